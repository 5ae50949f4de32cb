// Command-line front end. Links only the C API.

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nhsym/nhsym.h>

namespace {

struct RunOptions {
    std::vector<std::string> names;
    std::string out_dir = "runs";
    int jobs = 1;
    double step = 0.0;
    long steps = 0;
    unsigned long long seed = 0;
    bool has_step = false, has_steps = false, has_seed = false;
};

std::mutex g_print_mutex;

// 0 = all checks passed, 1 = a check failed, 2 = load or runtime error
int run_one(const RunOptions& opt, const std::string& name) {
    nhsym_scenario* scenario = nullptr;
    if (nhsym_scenario_open(name.c_str(), &scenario) != NHSYM_OK) {
        std::lock_guard<std::mutex> lock(g_print_mutex);
        std::cerr << "error: " << name << ": " << nhsym_last_error() << "\n";
        return 2;
    }
    if (opt.has_step)
        nhsym_scenario_set_step(scenario, opt.step);
    if (opt.has_steps)
        nhsym_scenario_set_steps(scenario, opt.steps);
    if (opt.has_seed)
        nhsym_scenario_set_seed(scenario, opt.seed);

    std::filesystem::path dir =
        std::filesystem::path(opt.out_dir) / nhsym_scenario_name(scenario);
    nhsym_run* run = nullptr;
    nhsym_status rc = nhsym_scenario_run(scenario, dir.string().c_str(), &run);
    int status;
    if (rc != NHSYM_OK) {
        std::lock_guard<std::mutex> lock(g_print_mutex);
        std::cerr << "error: " << name << ": " << nhsym_last_error() << "\n";
        status = 2;
    } else {
        std::lock_guard<std::mutex> lock(g_print_mutex);
        std::cout << nhsym_run_report_text(run);
        std::cout << "  outputs: " << dir.string() << "\n";
        status = nhsym_run_passed(run) ? 0 : 1;
    }
    nhsym_run_free(run);
    nhsym_scenario_free(scenario);
    return status;
}

int run_command(const RunOptions& opt) {
    std::vector<int> results(opt.names.size(), 0);
    int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(opt.names.size())));
    if (jobs == 1) {
        for (std::size_t i = 0; i < opt.names.size(); ++i)
            results[i] = run_one(opt, opt.names[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t i = next.fetch_add(1);
                    if (i >= opt.names.size())
                        return;
                    results[i] = run_one(opt, opt.names[i]);
                }
            });
        for (auto& th : pool)
            th.join();
    }
    int status = 0;
    for (int r : results)
        status = std::max(status, r);
    return status;
}

int check_command(const std::string& path) {
    nhsym_scenario* scenario = nullptr;
    if (nhsym_scenario_load_file(path.c_str(), &scenario) != NHSYM_OK) {
        std::cerr << "invalid: " << nhsym_last_error() << "\n";
        return 1;
    }
    if (nhsym_scenario_validate(scenario) != NHSYM_OK) {
        std::cerr << "invalid: " << nhsym_last_error() << "\n";
        nhsym_scenario_free(scenario);
        return 1;
    }
    std::cout << "ok: " << nhsym_scenario_name(scenario) << "\n";
    nhsym_scenario_free(scenario);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string("nhsym ") + nhsym_version() +
                 " - constrained mechanics with conservation-law verification"};
    app.require_subcommand(1);

    RunOptions opt;
    CLI::App* run = app.add_subcommand(
        "run", "integrate scenarios and verify the requested checks (exit 0 iff all pass)");
    // run uses --h for the step size, so its help flag is --help only
    run->set_help_flag("--help", "print this help message and exit");
    run->add_option("scenario", opt.names, "builtin scenario name or scenario file path")
        ->required();
    run->add_option("--out", opt.out_dir,
                    "output directory; each scenario writes to <out>/<name>/")
        ->capture_default_str();
    run->add_option("--jobs", opt.jobs, "number of concurrent scenario runs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    CLI::Option* o_h = run->add_option("--h", opt.step, "override the integration step size");
    CLI::Option* o_steps = run->add_option("--steps", opt.steps, "override the step count");
    CLI::Option* o_seed = run->add_option("--seed", opt.seed, "override the sampling seed");

    std::string check_path;
    CLI::App* check = app.add_subcommand("check", "validate a scenario file without running it");
    check->add_option("path", check_path, "scenario file path")->required();

    CLI::App* list = app.add_subcommand("list-builtins", "list the builtin scenarios");

    CLI11_PARSE(app, argc, argv);

    opt.has_step = o_h->count() > 0;
    opt.has_steps = o_steps->count() > 0;
    opt.has_seed = o_seed->count() > 0;

    if (run->parsed())
        return run_command(opt);
    if (check->parsed())
        return check_command(check_path);
    if (list->parsed()) {
        std::cout << nhsym_builtin_listing();
        return 0;
    }
    return 0;
}
