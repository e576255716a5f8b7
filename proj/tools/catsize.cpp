// catsize: many-body distance between the current states of a flux qubit.
//
//   catsize sweep    [--config PATH] [flags]   D-bar, P(D=d), I, dN, gap per grid point
//   catsize spectrum [--config PATH] [flags]   lowest levels vs frustration + inset
//   catsize distance [--config PATH] [flags]   one point, both directions
//   catsize oracles                            closed-form checks, JSON report
//
// Exit codes: 0 success, 1 parameter error, 2 oracle failure, 3 I/O error.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "catsize/oracle_report.hpp"
#include "catsize/sweep.hpp"

namespace {

constexpr int kExitParameter = 1;
constexpr int kExitOracle = 2;
constexpr int kExitIo = 3;

// Flag name and help; the config key is the flag name with '-' -> '_'.
const std::vector<std::pair<std::string, std::string>> kFlags = {
    {"ej-over-ec", "E_J/E_C values, comma separated or [a, b, ...]"},
    {"alpha", "junction asymmetry values"},
    {"f", "frustration Phi/Phi_0"},
    {"delta-n", "charge truncation |n_1,2| <= delta_n"},
    {"d-max", "largest distance level generated"},
    {"rank-tol", "relative singular-value cutoff for new subspaces"},
    {"weight-tol", "stop once this much target weight is left"},
    {"weight-floor", "minimum branch weight for the filter extraction"},
    {"operator-set", "hops_and_numbers | hops_only"},
    {"extraction", "two_level | filter"},
    {"current-operator", "junction | loop"},
    {"f-points", "spectrum: number of f values on [0, 1]"},
    {"levels", "spectrum: number of levels"},
    {"format", "csv | json"},
    {"output", "output file (default: stdout)"},
    {"jobs", "worker threads"},
};

struct Subcommand {
    CLI::App* app = nullptr;
    std::string config_path;
    std::vector<std::string> values = std::vector<std::string>(kFlags.size());
};

void register_flags(Subcommand& sub) {
    sub.app->add_option("--config", sub.config_path, "flat TOML configuration file");
    for (std::size_t k = 0; k < kFlags.size(); ++k)
        sub.app->add_option("--" + kFlags[k].first, sub.values[k], kFlags[k].second);
}

catsize::SweepConfig resolve_config(const Subcommand& sub) {
    catsize::SweepConfig config;
    if (!sub.config_path.empty()) config = catsize::load_config(sub.config_path, config);
    for (std::size_t k = 0; k < kFlags.size(); ++k) {
        if (sub.app->count("--" + kFlags[k].first) == 0) continue;
        std::string key = kFlags[k].first;
        std::replace(key.begin(), key.end(), '-', '_');
        catsize::apply_setting(config, key, sub.values[k]);
    }
    config.validate();
    return config;
}

template <class Writer>
void emit(const std::string& path, Writer&& write) {
    if (path.empty()) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw catsize::IoError("cannot open '" + path + "' for writing");
    write(out);
    out.flush();
    if (!out) throw catsize::IoError("write to '" + path + "' failed");
}

std::string inset_path(const std::string& path) {
    std::filesystem::path p(path);
    const std::string ext = p.has_extension() ? p.extension().string() : ".csv";
    return (p.parent_path() / (p.stem().string() + "_inset" + ext)).string();
}

int run_sweep(const Subcommand& sub) {
    const auto config = resolve_config(sub);
    const auto rows = catsize::run_sweep(config);
    emit(config.output_path, [&](std::ostream& os) {
        if (config.format == catsize::OutputFormat::json)
            os << catsize::sweep_json(config, rows).dump(2) << '\n';
        else
            catsize::write_sweep_csv(os, config, rows);
    });
    return 0;
}

int run_spectrum(const Subcommand& sub) {
    const auto config = resolve_config(sub);
    const auto result = catsize::run_spectrum(config);
    if (config.format == catsize::OutputFormat::json) {
        emit(config.output_path,
             [&](std::ostream& os) { os << catsize::spectrum_json(config, result).dump(2) << '\n'; });
        return 0;
    }
    if (config.output_path.empty()) {
        catsize::write_spectrum_csv(std::cout, config, result.table);
        std::cout << '\n';
        catsize::write_inset_csv(std::cout, config, result.inset);
        return 0;
    }
    emit(config.output_path, [&](std::ostream& os) { catsize::write_spectrum_csv(os, config, result.table); });
    emit(inset_path(config.output_path), [&](std::ostream& os) { catsize::write_inset_csv(os, config, result.inset); });
    return 0;
}

int run_distance(const Subcommand& sub) {
    const auto config = resolve_config(sub);
    const auto run = catsize::run_distance(config);
    emit(config.output_path, [&](std::ostream& os) {
        if (config.format == catsize::OutputFormat::json)
            os << catsize::distance_json(config, run).dump(2) << '\n';
        else
            catsize::write_distance_csv(os, config, run);
    });
    return run.forward.error.empty() && run.backward.error.empty() ? 0 : kExitParameter;
}

int run_oracles(const std::string& output) {
    const auto report = catsize::run_oracles();
    emit(output, [&](std::ostream& os) { os << report.json().dump(2) << '\n'; });
    return report.passed() ? 0 : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Many-body distance between Schroedinger-cat branches of a flux qubit"};
    app.require_subcommand(1);

    Subcommand sweep, spectrum, distance;
    sweep.app = app.add_subcommand("sweep", "distance, current and charge fluctuation over an E_J/E_C x alpha grid");
    spectrum.app = app.add_subcommand("spectrum", "energy levels versus frustration and the ground-state current distribution");
    distance.app = app.add_subcommand("distance", "distance distribution at a single point, both directions");
    for (Subcommand* s : {&sweep, &spectrum, &distance}) register_flags(*s);

    std::string oracle_output;
    CLI::App* oracles = app.add_subcommand("oracles", "run the closed-form oracle checks");
    oracles->add_option("--output", oracle_output, "report file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParameter;
    }

    try {
        if (*sweep.app) return run_sweep(sweep);
        if (*spectrum.app) return run_spectrum(spectrum);
        if (*distance.app) return run_distance(distance);
        if (*oracles) return run_oracles(oracle_output);
    } catch (const catsize::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    } catch (const catsize::ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return kExitParameter;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitParameter;
    }
    return kExitParameter;
}
