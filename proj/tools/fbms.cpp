#include "fbms/catenoid/catenoid.hpp"
#include "fbms/geom/equivariance.hpp"
#include "fbms/geom/obj_io.hpp"
#include "fbms/geom/quotient.hpp"
#include "fbms/geom/topology.hpp"
#include "fbms/minimizer/minimizer.hpp"
#include "fbms/sweepout/sweepout.hpp"
#include "fbms/width/width.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace fbms;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { kPass = 0, kFail = 1, kUsage = 2, kInternal = 3 };

struct RunConfig {
    std::string command;
    int g = 1;
    int grid = 200;
    int resolution = 0;
    double t = 0.5;
    std::string out = "fbms_out";
    std::uint64_t seed = 1;
    double r = -1, h = -1, t0 = -1, eps_power = -1;
    double tol_grad = -1;
    double tol_sigma = 3.0;
    double tol_inconsistency = 0.01;
    long volume_samples = 1000000;
    long complement_samples = 100000;
    int max_iter = -1;
    double step = -1;
    std::string options_file;
    std::string mesh;
    int threads = 1;
};

struct Runner {
    RunConfig cfg;
    std::filesystem::path dir;

    SweepoutSchedule<Quad> schedule() const {
        return override_schedule(default_schedule<Quad>(cfg.g), cfg.r, cfg.h, cfg.t0, cfg.eps_power);
    }

    Json config_json(const std::string& command) const {
        Json j;
        j["version"] = FBMS_VERSION;
        j["command"] = command;
        j["g"] = cfg.g;
        if (command == "catenoid") {
            j["r"] = cfg.r > 0 ? cfg.r : 1.0;
            j["h"] = cfg.h > 0 ? cfg.h : 0.2;
        } else {
            const auto s = schedule();
            j["grid"] = cfg.grid;
            j["resolution"] = cfg.resolution > 0 ? cfg.resolution : 64 * (cfg.g + 1);
            j["r"] = static_cast<double>(s.r);
            j["h"] = static_cast<double>(s.h);
            j["t0"] = static_cast<double>(s.t0);
            j["eps0"] = static_cast<double>(s.eps0);
            j["eps_power"] = static_cast<double>(s.eps_power);
        }
        if (command == "slice" || command == "topology") j["t"] = cfg.t;
        j["seed"] = cfg.seed;
        j["tol_grad"] = cfg.tol_grad;
        j["tol_sigma"] = cfg.tol_sigma;
        j["tol_inconsistency"] = cfg.tol_inconsistency;
        j["volume_samples"] = cfg.volume_samples;
        j["complement_samples"] = cfg.complement_samples;
        j["max_iter"] = cfg.max_iter;
        j["step"] = cfg.step;
        j["options_file"] = cfg.options_file;
        j["mesh"] = cfg.mesh;
        j["out"] = cfg.out;
        j["threads"] = cfg.threads;
        return j;
    }

    std::ofstream open(const std::string& name) const {
        std::ofstream f(dir / name);
        require(static_cast<bool>(f), ErrorKind::Io, "cannot write " + (dir / name).string());
        f << std::setprecision(17);
        return f;
    }

    void write_json(const std::string& name, const Json& j) const { open(name) << j.dump(2) << '\n'; }

    std::string tag() const { return "g" + std::to_string(cfg.g); }

    int catenoid() {
        const double r = cfg.r > 0 ? cfg.r : 1.0, h = cfg.h > 0 ? cfg.h : 0.2;
        const auto rep = catenoid_report(r, h);
        {
            auto f = open("catenoid.csv");
            write_catenoid_csv(f, {rep});
        }
        Json j;
        j["r"] = rep.r;
        j["h"] = rep.h;
        j["s1"] = rep.s1;
        j["s2"] = rep.s2;
        j["area_s1"] = rep.area_s1;
        j["area_s2"] = rep.area_s2;
        j["area_cylinder"] = rep.area_cylinder;
        j["s2h"] = rep.s2h;
        j["grid_violations"] = rep.maximality.grid_violations;
        j["local_min_at_s1"] = rep.maximality.local_min_at_s1;
        j["local_max_at_s2"] = rep.maximality.local_max_at_s2;
        j["s2h_above_one"] = rep.maximality.s2h_above_one;
        j["above_tanh_disc_area"] = rep.maximality.above_tanh_disc_area;
        j["above_cylinder"] = rep.maximality.above_cylinder;
        j["estimate_holds"] = rep.estimate.holds;
        j["estimate_margin"] = rep.estimate.margin;
        j["pass"] = rep.checks_passed;
        j["config"] = config_json("catenoid");
        write_json("catenoid.json", j);
        std::cout << "catenoid r=" << r << " h=" << h << " s1=" << rep.s1 << " s2=" << rep.s2
                  << (rep.checks_passed ? " PASS" : " FAIL") << '\n';
        return rep.checks_passed ? kPass : kFail;
    }

    static Json sweep_summary(const SweepReport& rep) {
        Json j;
        j["g"] = rep.g;
        j["grid_size"] = rep.slices.size();
        j["resolution"] = rep.resolution;
        j["failed_slices"] = rep.failed_slices();
        j["max_area"] = static_cast<double>(rep.max_area);
        j["max_area_tolerance"] = rep.max_area_tolerance;
        j["margin_ok"] = rep.margin_ok;
        j["monotone_ok"] = rep.monotone_ok;
        j["continuity_ok"] = rep.continuity_ok;
        auto& joins = j["joins"] = Json::array();
        for (const auto& s : rep.joins)
            joins.push_back({{"t", static_cast<double>(s.t)},
                             {"above", to_string(s.above)},
                             {"below", to_string(s.below)},
                             {"area_above", static_cast<double>(s.area_above)},
                             {"area_below", static_cast<double>(s.area_below)},
                             {"tolerance", s.tolerance},
                             {"ok", s.ok}});
        j["pass"] = rep.passed();
        return j;
    }

    int sweep() {
        const auto rep = run_sweep(schedule(), cfg.grid, cfg.resolution);
        {
            auto f = open("sweep_" + tag() + ".csv");
            write_sweep_csv(f, rep);
        }
        Json j = sweep_summary(rep);
        j["config"] = config_json("sweep");
        write_json("sweep_" + tag() + ".json", j);
        std::cout << "sweep g=" << cfg.g << " slices=" << rep.slices.size() << " failed=" << rep.failed_slices()
                  << " max_area=" << static_cast<double>(rep.max_area) << (rep.passed() ? " PASS" : " FAIL") << '\n';
        return rep.passed() ? kPass : kFail;
    }

    static Json certificate_json(const SliceCertificate& c) {
        Json j;
        j["g"] = c.g;
        j["t"] = c.t;
        j["stage"] = to_string(c.stage);
        j["area"] = static_cast<double>(c.area);
        j["bound"] = static_cast<double>(c.bound);
        j["tolerance"] = c.tolerance;
        j["genus"] = c.genus;
        j["boundary_components"] = c.boundary_components;
        j["ribbons"] = c.ribbons;
        j["equivariance_residual"] = c.equivariance_residual;
        j["max_edge"] = c.max_edge;
        j["pass"] = c.passed();
        if (!c.error.empty()) j["error"] = c.error;
        return j;
    }

    int slice() {
        const SliceSpec<Quad> spec{schedule(), Quad(cfg.t), cfg.resolution};
        const auto mesh = build_slice(spec);
        const auto cert = certify_slice(spec, mesh);
        write_obj((dir / ("slice_" + tag() + ".obj")).string(), mesh.cast<double>());
        Json j = certificate_json(cert);
        j["config"] = config_json("slice");
        write_json("slice_" + tag() + ".json", j);
        std::cout << "slice g=" << cfg.g << " t=" << cfg.t << " stage=" << to_string(cert.stage)
                  << " area=" << static_cast<double>(cert.area) << (cert.passed() ? " PASS" : " FAIL") << '\n';
        return cert.passed() ? kPass : kFail;
    }

    int width() {
        WidthOptions opt;
        opt.grid = cfg.grid;
        opt.resolution = cfg.resolution;
        opt.volume_samples = cfg.volume_samples;
        opt.complement_samples = cfg.complement_samples;
        opt.seed = cfg.seed;
        opt.sigma_k = cfg.tol_sigma;
        opt.max_inconsistency = cfg.tol_inconsistency;
        const auto rep = audit_width(schedule(), opt);
        std::ostringstream os;
        write_width_json(os, rep, config_json("width").dump());
        Json j = Json::parse(os.str());
        const bool pass = rep.bracket_ok && rep.sweep.passed() && rep.volumes_ok() && rep.complements_ok();
        j["sweep_pass"] = rep.sweep.passed();
        j["volumes_ok"] = rep.volumes_ok();
        j["complements_ok"] = rep.complements_ok();
        j["pass"] = pass;
        write_json("width_" + tag() + ".json", j);
        std::cout << "width g=" << cfg.g << " lower=" << rep.bracket.lower << " upper=" << static_cast<double>(rep.bracket.upper)
                  << (pass ? " PASS" : " FAIL") << '\n';
        return pass ? kPass : kFail;
    }

    int minimize_run() {
        MinimizeOptions opt;
        opt.seed = cfg.seed;
        if (!cfg.options_file.empty()) opt = read_minimize_options(cfg.options_file, opt);
        if (cfg.tol_grad > 0) opt.tol = cfg.tol_grad;
        if (cfg.max_iter >= 0) opt.max_iter = cfg.max_iter;
        if (cfg.step > 0) opt.step = cfg.step;
        opt.symmetry = cfg.g + 1;
        opt.expected_genus = cfg.g;
        opt.validate();

        Json seed_info;
        TriMesh<double> seed;
        if (!cfg.mesh.empty()) {
            seed = read_obj<double>(cfg.mesh);
            seed_info["source"] = cfg.mesh;
        } else {
            const auto s = max_area_seed(schedule(), cfg.grid, cfg.resolution);
            seed = s.mesh;
            seed_info["source"] = "max_area_slice";
            seed_info["t"] = static_cast<double>(s.t);
            seed_info["grid_index"] = s.index;
            seed_info["area"] = s.area;
        }
        const auto res = minimize(seed, opt);
        write_obj((dir / ("minimize_" + tag() + ".obj")).string(), res.mesh);
        {
            auto f = open("minimize_" + tag() + "_history.csv");
            write_history_csv(f, res.history);
        }
        Json cfgj = config_json("minimize");
        cfgj["minimizer"] = {{"step", opt.step},
                             {"tol", opt.tol},
                             {"max_iter", opt.max_iter},
                             {"cadence", opt.symmetrize_every},
                             {"remesh", opt.remesh_every},
                             {"symmetry", opt.symmetry},
                             {"seed", opt.seed}};
        cfgj["seed_mesh"] = seed_info;
        {
            auto f = open("minimize_" + tag() + ".json");
            write_certificate_json(f, res.certificate, cfgj.dump());
        }
        const auto& c = res.certificate;
        std::cout << "minimize g=" << cfg.g << " area=" << c.area << " genus=" << c.genus
                  << " boundary=" << c.boundary_components << " iterations=" << c.iterations
                  << (c.converged ? " converged" : c.stalled ? " stalled" : " max-iter") << (c.passed() ? " PASS" : " FAIL")
                  << '\n';
        return c.passed() ? kPass : kFail;
    }

    int topology() {
        const int n = cfg.g + 1;
        TriMesh<double> m;
        if (!cfg.mesh.empty()) {
            m = read_obj<double>(cfg.mesh);
        } else {
            m = build_slice(SliceSpec<Quad>{schedule(), Quad(cfg.t), cfg.resolution}).cast<double>();
        }
        Json j;
        j["euler_characteristic"] = euler_characteristic(m);
        j["boundary_components"] = boundary_components(m);
        bool pass = false;
        try {
            const auto gr = genus_certificate(m, cfg.g);
            j["genus"] = gr.genus;
            j["axis_crossings"] = gr.crossings;
            j["j"] = gr.j;
            if (gr.solution) j["solution"] = {gr.solution->first, gr.solution->second};
            else j["solution"] = nullptr;
            j["equivariance_residual"] = gr.equivariance_residual;
            const auto q = rotation_quotient(m, n);
            const bool rh = riemann_hurwitz_check(euler_characteristic(m), q.euler_characteristic, cfg.g, gr.j);
            j["quotient_euler_characteristic"] = q.euler_characteristic;
            j["riemann_hurwitz"] = rh;
            j["genus_certificate"] = gr.pass;
            pass = gr.pass && rh;
        } catch (const Error& e) {
            j["error"] = {{"kind", to_string(e.kind())}, {"message", e.what()}};
        }
        j["pass"] = pass;
        j["config"] = config_json("topology");
        write_json("topology_" + tag() + ".json", j);
        std::cout << "topology g=" << cfg.g << (pass ? " PASS" : " FAIL") << '\n';
        return pass ? kPass : kFail;
    }

    int run(const std::string& command) {
        if (command == "catenoid") return catenoid();
        if (command == "sweep") return sweep();
        if (command == "slice") return slice();
        if (command == "width") return width();
        if (command == "minimize") return minimize_run();
        if (command == "topology") return topology();
        if (command == "all") {
            int worst = kPass;
            for (const char* c : {"catenoid", "sweep", "width", "minimize"}) worst = std::max(worst, run(c));
            return worst;
        }
        throw Error(ErrorKind::Usage, "unknown command " + command);
    }
};

int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::Usage:
        case ErrorKind::Precondition:
        case ErrorKind::Domain:
        case ErrorKind::InvalidOrder:
        case ErrorKind::NoRoots:
            return kUsage;
        default:
            return kInternal;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Free boundary minimal surface sweepout toolkit"};
    app.set_help_flag("--help", "print this help");
    app.set_version_flag("--version", std::string(FBMS_VERSION));
    app.set_config("--config", "", "flat key = value file; command line flags take precedence");
    RunConfig cfg;
    std::string positional;
    app.add_option("cmd", positional, "catenoid | sweep | slice | width | minimize | topology | all");
    app.add_option("--command", cfg.command, "same as the positional command");
    app.add_option("--g", cfg.g, "genus g >= 1")->check(CLI::PositiveNumber);
    app.add_option("--grid", cfg.grid, "t-grid size")->check(CLI::Range(2, 1 << 20));
    app.add_option("--resolution", cfg.resolution, "boundary points per circle (0: 64(g+1))")->check(CLI::NonNegativeNumber);
    app.add_option("--t", cfg.t, "slice parameter for slice / topology");
    app.add_option("--out", cfg.out, "output directory");
    app.add_option("--seed", cfg.seed, "RNG seed");
    app.add_option("--r", cfg.r, "ribbon radius override, or catenoid circle radius");
    app.add_option("--h", cfg.h, "height override, or catenoid half-height");
    app.add_option("--t0", cfg.t0, "stage parameter override");
    app.add_option("--eps-power", cfg.eps_power, "ribbon radius profile exponent");
    app.add_option("--tol-grad", cfg.tol_grad, "minimizer gradient tolerance");
    app.add_option("--tol-sigma", cfg.tol_sigma, "volume residual bound in standard errors");
    app.add_option("--tol-inconsistency", cfg.tol_inconsistency, "max side-label inconsistency");
    app.add_option("--volume-samples", cfg.volume_samples, "Monte Carlo samples per slice")->check(CLI::PositiveNumber);
    app.add_option("--complement-samples", cfg.complement_samples, "complement check samples per slice")->check(CLI::PositiveNumber);
    app.add_option("--max-iter", cfg.max_iter, "minimizer iteration cap");
    app.add_option("--step", cfg.step, "minimizer initial step");
    app.add_option("--options", cfg.options_file, "minimizer key-value options file");
    app.add_option("--mesh", cfg.mesh, "seed / input OBJ for minimize and topology");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kPass : kUsage;
    }
    if (cfg.command.empty()) cfg.command = positional;
    if (cfg.command.empty()) {
        std::cerr << "no command given\n" << app.help();
        return kUsage;
    }

    Runner runner{cfg, cfg.out};
    auto error_record = [&](const std::string& kind, const std::string& msg) {
        Json j;
        j["error"] = {{"kind", kind}, {"message", msg}};
        j["config"] = {{"version", FBMS_VERSION}, {"command", cfg.command}, {"g", cfg.g}, {"grid", cfg.grid},
                       {"resolution", cfg.resolution}, {"seed", cfg.seed}, {"out", cfg.out}};
        std::cout << j.dump() << '\n';
        std::error_code ec;
        std::filesystem::create_directories(runner.dir, ec);
        std::ofstream f(runner.dir / "error.json");
        if (f) f << j.dump(2) << '\n';
    };
    try {
        if (const char* env = std::getenv("FBMS_THREADS")) {
            int n = 0;
            try {
                n = std::stoi(env);
            } catch (const std::exception&) {
            }
            require(n >= 1, ErrorKind::Usage, std::string("FBMS_THREADS must be a positive integer, got ") + env);
            runner.cfg.threads = n;
        }
        require(cfg.g >= 1, ErrorKind::Usage, "g must be >= 1");
        std::error_code ec;
        std::filesystem::create_directories(runner.dir, ec);
        require(!ec && std::filesystem::is_directory(runner.dir), ErrorKind::Usage, "output directory " + cfg.out + " is not writable");
        {
            std::ofstream probe(runner.dir / ".probe");
            require(static_cast<bool>(probe), ErrorKind::Usage, "output directory " + cfg.out + " is not writable");
        }
        std::filesystem::remove(runner.dir / ".probe", ec);
        return runner.run(cfg.command);
    } catch (const Error& e) {
        error_record(to_string(e.kind()), e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        error_record("internal", e.what());
        return kInternal;
    }
}
