#pragma once

/* Configuration-driven runs behind the command-line tool.
 *
 * Configuration is a flat key/value file in TOML syntax:
 *
 *     ej_over_ec = [2, 5, 10, 20, 50]
 *     alpha      = [0.8, 1.0]
 *     f          = 0.5
 *     delta_n    = 6
 *     extraction = "two_level"
 *
 * Every key can be overridden by the command-line flag of the same name with
 * '_' replaced by '-'.
 */

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "catsize/distance.hpp"
#include "catsize/errors.hpp"
#include "catsize/flux_qubit.hpp"
#include "catsize/parallel.hpp"
#include "catsize/spectra.hpp"

namespace catsize {

/// Raised for unreadable or unwritable files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class OutputFormat { csv, json };

struct SweepConfig {
    std::vector<double> ej_over_ec_grid{2.0, 5.0, 10.0, 20.0, 50.0};
    std::vector<double> alpha_grid{1.0};
    double f = 0.5;
    int delta_n = 6;
    int d_max = 12;
    double rank_tol = 1e-10;
    double weight_tol = 1e-6;
    FluxOperatorChoice operator_set = FluxOperatorChoice::hops_and_numbers;
    Extraction extraction = Extraction::two_level;
    CurrentKind current_operator = CurrentKind::alpha_junction;
    double weight_floor = 1e-6;
    int f_points = 41; ///< spectrum grid over [0, 1]
    int levels = 4;    ///< spectrum levels
    std::string output_path;  ///< empty: stdout
    OutputFormat format = OutputFormat::csv;
    unsigned jobs = 1;

    void validate() const {
        if (ej_over_ec_grid.empty()) throw ParameterError("ej_over_ec grid is empty");
        if (alpha_grid.empty()) throw ParameterError("alpha grid is empty");
        for (double r : ej_over_ec_grid)
            if (!(r > 0.0)) throw ParameterError("ej_over_ec values must be positive");
        for (double a : alpha_grid)
            if (!(a > 0.0)) throw ParameterError("alpha values must be in (0, 1]");
        if (!std::isfinite(f)) throw ParameterError("f must be finite");
        if (delta_n < 1) throw ParameterError("delta_n must be >= 1");
        if (d_max < 0) throw ParameterError("d_max must be >= 0");
        if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw ParameterError("rank_tol must be in (0, 1)");
        if (!(weight_tol >= 0.0 && weight_tol < 1.0)) throw ParameterError("weight_tol must be in [0, 1)");
        if (f_points < 1) throw ParameterError("f_points must be >= 1");
        if (levels < 2) throw ParameterError("levels must be >= 2");
        if (jobs < 1) throw ParameterError("jobs must be >= 1");
    }

    FluxQubitOptions options() const {
        FluxQubitOptions opt;
        opt.chain = {d_max, rank_tol, weight_tol};
        opt.operators = operator_set;
        opt.extraction = extraction;
        opt.current = current_operator;
        opt.weight_floor = weight_floor;
        return opt;
    }
};

// Formatting ---------------------------------------------------------------

/// 17 significant digits with '.' as decimal separator, independent of locale.
inline std::string format_real(double x) {
    if (std::isnan(x)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string format_list(const std::vector<double>& xs) {
    std::string s = "[";
    for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? ", " : "") + format_real(xs[k]);
    return s + "]";
}

// Parsing ------------------------------------------------------------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string unquote(std::string s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
    return s;
}

inline double parse_real(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        throw ParameterError(key + ": '" + t + "' is not a number");
    }
    if (used != t.size()) throw ParameterError(key + ": '" + t + "' is not a number");
    return v;
}

inline int parse_int(const std::string& key, const std::string& text) {
    const double v = parse_real(key, text);
    if (v != std::floor(v) || std::abs(v) > 1e9) throw ParameterError(key + ": expected an integer");
    return static_cast<int>(v);
}

/// "[1, 2.5, 3]", "1, 2.5, 3" or "2".
inline std::vector<double> parse_list(const std::string& key, std::string text) {
    text = trim(text);
    if (!text.empty() && text.front() == '[') {
        if (text.back() != ']') throw ParameterError(key + ": unterminated list");
        text = text.substr(1, text.size() - 2);
    }
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_real(key, item));
    }
    return out;
}

}  // namespace detail

/// Applies one setting; `key` uses the config-file spelling.
inline void apply_setting(SweepConfig& c, const std::string& key, const std::string& raw) {
    const std::string value = detail::unquote(raw);
    if (key == "ej_over_ec") c.ej_over_ec_grid = detail::parse_list(key, value);
    else if (key == "alpha") c.alpha_grid = detail::parse_list(key, value);
    else if (key == "f") c.f = detail::parse_real(key, value);
    else if (key == "delta_n") c.delta_n = detail::parse_int(key, value);
    else if (key == "d_max") c.d_max = detail::parse_int(key, value);
    else if (key == "rank_tol") c.rank_tol = detail::parse_real(key, value);
    else if (key == "weight_tol") c.weight_tol = detail::parse_real(key, value);
    else if (key == "weight_floor") c.weight_floor = detail::parse_real(key, value);
    else if (key == "f_points") c.f_points = detail::parse_int(key, value);
    else if (key == "levels") c.levels = detail::parse_int(key, value);
    else if (key == "output") c.output_path = value;
    else if (key == "jobs") {
        const int j = detail::parse_int(key, value);
        if (j < 1) throw ParameterError("jobs must be >= 1");
        c.jobs = static_cast<unsigned>(j);
    } else if (key == "operator_set") {
        if (value == "hops_and_numbers") c.operator_set = FluxOperatorChoice::hops_and_numbers;
        else if (value == "hops_only") c.operator_set = FluxOperatorChoice::hops_only;
        else throw ParameterError("operator_set must be hops_and_numbers or hops_only");
    } else if (key == "extraction") {
        if (value == "two_level") c.extraction = Extraction::two_level;
        else if (value == "filter") c.extraction = Extraction::filter;
        else throw ParameterError("extraction must be two_level or filter");
    } else if (key == "current_operator") {
        if (value == "junction") c.current_operator = CurrentKind::alpha_junction;
        else if (value == "loop") c.current_operator = CurrentKind::loop;
        else throw ParameterError("current_operator must be junction or loop");
    } else if (key == "format") {
        if (value == "csv") c.format = OutputFormat::csv;
        else if (value == "json") c.format = OutputFormat::json;
        else throw ParameterError("format must be csv or json");
    } else {
        throw ParameterError("unknown configuration key '" + key + "'");
    }
}

inline std::vector<std::pair<std::string, std::string>> parse_config_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::stringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        // '#' starts a comment unless inside quotes.
        bool quoted = false;
        for (std::size_t k = 0; k < line.size(); ++k) {
            if (line[k] == '"') quoted = !quoted;
            if (line[k] == '#' && !quoted) {
                line.resize(k);
                break;
            }
        }
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.find('=') == std::string::npos)
            throw ParameterError("config line " + std::to_string(lineno) + ": tables are not supported");
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParameterError("config line " + std::to_string(lineno) + ": expected key = value");
        out.emplace_back(detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    }
    return out;
}

inline SweepConfig load_config(const std::string& path, SweepConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    for (const auto& [k, v] : parse_config_text(buf.str())) apply_setting(base, k, v);
    return base;
}

/// Config echo, one "key = value" line per setting, in a fixed order.
inline std::vector<std::string> config_lines(const SweepConfig& c) {
    return {
        "ej_over_ec = " + format_list(c.ej_over_ec_grid),
        "alpha = " + format_list(c.alpha_grid),
        "f = " + format_real(c.f),
        "delta_n = " + std::to_string(c.delta_n),
        "d_max = " + std::to_string(c.d_max),
        "rank_tol = " + format_real(c.rank_tol),
        "weight_tol = " + format_real(c.weight_tol),
        "weight_floor = " + format_real(c.weight_floor),
        "operator_set = \"" + to_string(c.operator_set) + "\"",
        "extraction = \"" + to_string(c.extraction) + "\"",
        "current_operator = \"" + to_string(c.current_operator) + "\"",
        "f_points = " + std::to_string(c.f_points),
        "levels = " + std::to_string(c.levels),
    };
}

inline nlohmann::ordered_json config_json(const SweepConfig& c) {
    return {{"ej_over_ec", c.ej_over_ec_grid}, {"alpha", c.alpha_grid},
            {"f", c.f},                        {"delta_n", c.delta_n},
            {"d_max", c.d_max},                {"rank_tol", c.rank_tol},
            {"weight_tol", c.weight_tol},      {"weight_floor", c.weight_floor},
            {"operator_set", to_string(c.operator_set)}, {"extraction", to_string(c.extraction)},
            {"current_operator", to_string(c.current_operator)}, {"f_points", c.f_points},
            {"levels", c.levels}};
}

namespace detail {

inline nlohmann::ordered_json real_or_null(double x) {
    return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
}

inline void write_comment_header(std::ostream& os, const std::string& command, const SweepConfig& c) {
    os << "# catsize " << command << '\n';
    for (const auto& line : config_lines(c)) os << "# " << line << '\n';
}

}  // namespace detail

// Sweep --------------------------------------------------------------------

struct SweepRow {
    double ej_over_ec = 0.0;
    double alpha = 0.0;
    std::vector<double> weights;
    double mean = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    double current = std::numeric_limits<double>::quiet_NaN();
    double charge_fluctuation = std::numeric_limits<double>::quiet_NaN();
    double gap = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::size_t> dims;
    bool decreasing = false; ///< mean below the previous E_J/E_C point at this alpha
    std::string error;
};

inline SweepRow evaluate_point(const FluxQubitParams& p, const FluxQubitOptions& opt) {
    SweepRow row;
    row.ej_over_ec = p.ej_over_ec;
    row.alpha = p.alpha;
    try {
        const FluxQubitPoint point = prepare_flux_qubit(p, opt);
        row.current = point.states.current;
        row.charge_fluctuation = point.charge_fluctuation;
        row.gap = point.gap;
        const DistanceDistribution dist = flux_qubit_distance(point, opt);
        row.weights = dist.weights;
        row.mean = dist.mean;
        row.residual = dist.residual;
        row.dims = dist.dims;
    } catch (const UnreachableTargetError& e) {
        row.error = std::string("unreachable_target: ") + e.what();
    } catch (const DegenerateCurrentError& e) {
        row.error = std::string("degenerate_current: ") + e.what();
    } catch (const InsufficientWeightError& e) {
        row.error = std::string("insufficient_weight: ") + e.what();
    } catch (const InternalError& e) {
        row.error = std::string("internal: ") + e.what();
    }
    return row;
}

/// One row per (alpha, E_J/E_C) in grid order, alpha outermost.
inline std::vector<SweepRow> run_sweep(const SweepConfig& c) {
    c.validate();
    std::vector<FluxQubitParams> points;
    for (double a : c.alpha_grid)
        for (double r : c.ej_over_ec_grid) {
            FluxQubitParams p{r, a, c.f, c.delta_n};
            p.validate();
            points.push_back(p);
        }
    const FluxQubitOptions opt = c.options();
    std::vector<SweepRow> rows(points.size());
    parallel_for(points.size(), c.jobs, [&](std::size_t k) { rows[k] = evaluate_point(points[k], opt); });
    for (std::size_t k = 1; k < rows.size(); ++k)
        if (rows[k].alpha == rows[k - 1].alpha && std::isfinite(rows[k].mean) && std::isfinite(rows[k - 1].mean))
            rows[k].decreasing = rows[k].mean < rows[k - 1].mean;
    return rows;
}

inline std::string format_dims(const std::vector<std::size_t>& dims) {
    std::string s;
    for (std::size_t k = 0; k < dims.size(); ++k) s += (k ? ";" : "") + std::to_string(dims[k]);
    return s;
}

inline std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return out + "\"";
}

inline void write_sweep_csv(std::ostream& os, const SweepConfig& c, const std::vector<SweepRow>& rows) {
    detail::write_comment_header(os, "sweep", c);
    os << "ej_over_ec,alpha,mean_distance";
    for (int d = 0; d <= c.d_max; ++d) os << ",p_" << d;
    os << ",residual,current,charge_fluctuation,gap,chain_dims,decreasing,error\n";
    for (const auto& r : rows) {
        os << format_real(r.ej_over_ec) << ',' << format_real(r.alpha) << ',' << format_real(r.mean);
        for (int d = 0; d <= c.d_max; ++d) {
            const auto k = static_cast<std::size_t>(d);
            os << ',' << (r.error.empty() ? format_real(k < r.weights.size() ? r.weights[k] : 0.0) : "nan");
        }
        os << ',' << format_real(r.residual) << ',' << format_real(r.current) << ','
           << format_real(r.charge_fluctuation) << ',' << format_real(r.gap) << ',' << format_dims(r.dims) << ','
           << (r.decreasing ? 1 : 0) << ',' << csv_escape(r.error) << '\n';
    }
}

inline nlohmann::ordered_json sweep_json(const SweepConfig& c, const std::vector<SweepRow>& rows) {
    nlohmann::ordered_json out;
    out["command"] = "sweep";
    out["config"] = config_json(c);
    out["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json j;
        j["ej_over_ec"] = r.ej_over_ec;
        j["alpha"] = r.alpha;
        j["mean_distance"] = detail::real_or_null(r.mean);
        j["weights"] = r.weights;
        j["residual"] = detail::real_or_null(r.residual);
        j["current"] = detail::real_or_null(r.current);
        j["charge_fluctuation"] = detail::real_or_null(r.charge_fluctuation);
        j["gap"] = detail::real_or_null(r.gap);
        j["chain_dims"] = r.dims;
        j["decreasing"] = r.decreasing;
        j["error"] = r.error.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.error);
        out["rows"].push_back(std::move(j));
    }
    return out;
}

// Spectrum -----------------------------------------------------------------

struct SpectrumResult {
    SpectrumTable table;
    std::vector<CurrentWeight> inset; ///< ground-state current distribution at f = 1/2
};

/// Uses the first entries of the E_J/E_C and alpha grids.
inline SpectrumResult run_spectrum(const SweepConfig& c) {
    c.validate();
    FluxQubitParams p{c.ej_over_ec_grid.front(), c.alpha_grid.front(), 0.5, c.delta_n};
    p.validate();
    std::vector<double> grid;
    for (int k = 0; k < c.f_points; ++k) grid.push_back(c.f_points == 1 ? 0.5 : static_cast<double>(k) / (c.f_points - 1));
    SpectrumResult out;
    out.table = spectrum_vs_frustration(p, grid, static_cast<std::size_t>(c.levels), c.jobs);
    const BasisPtr basis = charge3_basis(p.delta_n);
    const auto eig = eig_hermitian(flux_qubit_hamiltonian(p, basis));
    out.inset = current_distribution(eig.vector(0), current_operator(p, basis, c.current_operator));
    return out;
}

inline void write_spectrum_csv(std::ostream& os, const SweepConfig& c, const SpectrumTable& t) {
    detail::write_comment_header(os, "spectrum", c);
    const std::size_t levels = t.levels.empty() ? 0 : t.levels.front().size();
    os << 'f';
    for (std::size_t k = 0; k < levels; ++k) os << ",E_" << k;
    os << '\n';
    for (std::size_t r = 0; r < t.f.size(); ++r) {
        os << format_real(t.f[r]);
        for (double e : t.levels[r]) os << ',' << format_real(e);
        os << '\n';
    }
}

inline void write_inset_csv(std::ostream& os, const SweepConfig& c, const std::vector<CurrentWeight>& inset) {
    detail::write_comment_header(os, "spectrum current_distribution f=0.5", c);
    os << "current,weight\n";
    for (const auto& [i, w] : inset) os << format_real(i) << ',' << format_real(w) << '\n';
}

inline nlohmann::ordered_json spectrum_json(const SweepConfig& c, const SpectrumResult& s) {
    nlohmann::ordered_json out;
    out["command"] = "spectrum";
    out["config"] = config_json(c);
    out["f"] = s.table.f;
    out["levels"] = s.table.levels;
    out["current_distribution"] = nlohmann::ordered_json::array();
    for (const auto& [i, w] : s.inset) out["current_distribution"].push_back({{"current", i}, {"weight", w}});
    return out;
}

// Single distance run ------------------------------------------------------

struct DistanceRun {
    SweepRow forward;
    SweepRow backward;
};

/// |+I> -> |-I> and back at the first grid point.
inline DistanceRun run_distance(const SweepConfig& c) {
    c.validate();
    const FluxQubitParams p{c.ej_over_ec_grid.front(), c.alpha_grid.front(), c.f, c.delta_n};
    p.validate();
    FluxQubitOptions opt = c.options();
    DistanceRun run;
    run.forward = evaluate_point(p, opt);
    opt.reverse = true;
    run.backward = evaluate_point(p, opt);
    return run;
}

inline void write_distance_csv(std::ostream& os, const SweepConfig& c, const DistanceRun& run) {
    detail::write_comment_header(os, "distance", c);
    os << "# mean_forward = " << format_real(run.forward.mean) << '\n';
    os << "# mean_backward = " << format_real(run.backward.mean) << '\n';
    os << "# residual_forward = " << format_real(run.forward.residual) << '\n';
    os << "# residual_backward = " << format_real(run.backward.residual) << '\n';
    os << "# current = " << format_real(run.forward.current) << '\n';
    os << "# chain_dims = " << format_dims(run.forward.dims) << '\n';
    if (!run.forward.error.empty()) os << "# error = " << run.forward.error << '\n';
    os << "d,p_forward,p_backward\n";
    const std::size_t n = std::max(run.forward.weights.size(), run.backward.weights.size());
    for (std::size_t d = 0; d < n; ++d) {
        const double f = d < run.forward.weights.size() ? run.forward.weights[d] : 0.0;
        const double b = d < run.backward.weights.size() ? run.backward.weights[d] : 0.0;
        os << d << ',' << format_real(f) << ',' << format_real(b) << '\n';
    }
}

inline nlohmann::ordered_json distance_json(const SweepConfig& c, const DistanceRun& run) {
    auto side = [](const SweepRow& r) {
        return nlohmann::ordered_json{{"weights", r.weights},
                                      {"mean_distance", detail::real_or_null(r.mean)},
                                      {"residual", detail::real_or_null(r.residual)},
                                      {"chain_dims", r.dims},
                                      {"error", r.error.empty() ? nlohmann::ordered_json(nullptr)
                                                                : nlohmann::ordered_json(r.error)}};
    };
    nlohmann::ordered_json out;
    out["command"] = "distance";
    out["config"] = config_json(c);
    out["current"] = detail::real_or_null(run.forward.current);
    out["charge_fluctuation"] = detail::real_or_null(run.forward.charge_fluctuation);
    out["gap"] = detail::real_or_null(run.forward.gap);
    out["forward"] = side(run.forward);
    out["backward"] = side(run.backward);
    return out;
}

}  // namespace catsize
