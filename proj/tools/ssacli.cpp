// ssacli: decompose series/fields, run the grouping methods, calibrate the
// angle-method threshold, and reproduce the method-comparison tables.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "ssakit/ssakit.hpp"

using json = nlohmann::ordered_json;
using namespace ssakit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// Numbers may be given as plain reals or fractions like "1/7".
double parse_real(const std::string& text) {
    const auto slash = text.find('/');
    try {
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const double v = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
            return v;
        }
        const double num = std::stod(text.substr(0, slash));
        const double den = std::stod(text.substr(slash + 1));
        if (den == 0.0) throw std::invalid_argument(text);
        return num / den;
    } catch (const std::exception&) {
        throw ParameterError("cannot parse number '" + text + "'");
    }
}

/// Comma list ("0,0.2,0.4") or range syntax ("0:1.4:0.2").
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    if (text.find(':') != std::string::npos) {
        std::stringstream ss(text);
        std::string a, b, c;
        std::getline(ss, a, ':');
        std::getline(ss, b, ':');
        std::getline(ss, c, ':');
        const double start = parse_real(a), stop = parse_real(b), step = parse_real(c);
        if (step <= 0.0) throw ParameterError("grid step must be positive: " + text);
        for (double v = start; v <= stop + 1e-12; v += step) grid.push_back(v);
        return grid;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) grid.push_back(parse_real(item));
    if (grid.empty()) throw ParameterError("empty grid: '" + text + "'");
    return grid;
}

// ---------------------------------------------------------------------------
// CSV input

struct CsvTable {
    std::vector<std::vector<std::optional<double>>> rows;
    std::size_t columns = 0;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open input file '" + path + "'");
    CsvTable table;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        std::vector<std::optional<double>> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const std::string t = trim(cell);
            if (t.empty()) {
                row.push_back(std::nullopt);
                continue;
            }
            try {
                std::size_t used = 0;
                const double v = std::stod(t, &used);
                if (used != t.size()) throw std::invalid_argument(t);
                row.push_back(v);
            } catch (const std::exception&) {
                throw ParameterError("non-numeric cell '" + t + "' at " + path + ":" +
                                     std::to_string(lineno));
            }
        }
        if (row.empty()) row.push_back(std::nullopt);
        table.columns = std::max(table.columns, row.size());
        table.rows.push_back(std::move(row));
    }
    if (table.rows.empty()) throw ParameterError("input file '" + path + "' has no data");
    return table;
}

Vector csv_to_series(const CsvTable& table, const std::string& path) {
    Vector x(static_cast<Index>(table.rows.size()));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != 1 || !table.rows[r][0])
            throw ParameterError("1D input must be a single numeric column: " + path);
        x[static_cast<Index>(r)] = *table.rows[r][0];
    }
    return x;
}

/// Multichannel CSV: a header row with the channel lengths, then value rows;
/// cells are numeric up to the declared length and empty afterwards.
MultiSeries csv_to_multi(const CsvTable& table, const std::string& path) {
    if (table.rows.size() < 2) throw ParameterError("multichannel input too short: " + path);
    const auto& header = table.rows[0];
    std::vector<Index> lengths;
    for (const auto& cell : header) {
        if (!cell || *cell <= 0.0 || *cell != std::floor(*cell))
            throw ParameterError("multichannel input needs a header row of positive channel "
                                 "lengths: " + path);
        lengths.push_back(static_cast<Index>(*cell));
    }
    MultiSeries ms;
    for (std::size_t p = 0; p < lengths.size(); ++p)
        ms.channels.emplace_back(Vector::Zero(lengths[p]));
    const Index max_len = *std::max_element(lengths.begin(), lengths.end());
    if (static_cast<Index>(table.rows.size()) - 1 != max_len)
        throw ParameterError("expected " + std::to_string(max_len) + " data rows in " + path);
    for (Index r = 0; r < max_len; ++r) {
        const auto& row = table.rows[static_cast<std::size_t>(r) + 1];
        for (std::size_t p = 0; p < lengths.size(); ++p) {
            const bool in_range = r < lengths[p];
            const std::optional<double> cell = p < row.size() ? row[p] : std::nullopt;
            if (in_range) {
                if (!cell)
                    throw ParameterError("missing value for channel " + std::to_string(p + 1) +
                                         " at data row " + std::to_string(r + 1) + ": " + path);
                ms.channels[p][r] = *cell;
            } else if (cell) {
                throw ParameterError("value beyond declared length of channel " +
                                     std::to_string(p + 1) + ": " + path);
            }
        }
    }
    return ms;
}

Matrix csv_to_field(const CsvTable& table, const std::string& path) {
    const std::size_t cols = table.rows[0].size();
    Matrix f(static_cast<Index>(table.rows.size()), static_cast<Index>(cols));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (table.rows[r].size() != cols)
            throw ParameterError("2D input rows differ in length: " + path);
        for (std::size_t c = 0; c < cols; ++c) {
            if (!table.rows[r][c])
                throw ParameterError("2D input has an empty cell: " + path);
            f(static_cast<Index>(r), static_cast<Index>(c)) = *table.rows[r][c];
        }
    }
    return f;
}

// ---------------------------------------------------------------------------
// Output helpers

void write_text(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot write output file '" + path + "'");
    out << content;
}

std::string sibling_path(const std::string& base, const std::string& suffix) {
    if (base.empty() || base == "-") return "";
    const auto dot = base.find_last_of('.');
    const auto slash = base.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
        return base + suffix;
    return base.substr(0, dot) + suffix + base.substr(dot);
}

std::string config_comment(const json& config) {
    std::string out = "# ssacli " + config.at("subcommand").get<std::string>() + "\n";
    for (const auto& [key, value] : config.items()) {
        if (key == "subcommand") continue;
        out += "# " + key + "=" +
               (value.is_string() ? value.get<std::string>() : value.dump()) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Shared option state

struct CommonOpts {
    std::string input;
    std::string output;
    std::string format;
    Index window = 0;
    std::string window2d;
    std::string omega_text;
    std::string omega2_text;
    double threshold = -1.0;
    Index s0 = 1;
    double rho0 = 0.9;
    std::string t0_text;
    Index m = 0;
    std::string sigma_grid_text;
    Index nsim = 1000;
    Index nrep = 200;
    std::string seed_text;
    int threads = 1;
    double rank_tol = 1e-9;
    Index max_rank = 0;
    Index components = 0;
    std::string method;
    std::string source = "";
    bool recon = false;
};

std::uint64_t resolve_seed(const std::string& flag_value) {
    if (!flag_value.empty()) return std::stoull(flag_value);
    if (const char* env = std::getenv("SSAKIT_SEED")) return std::stoull(env);
    return kDefaultSeed;
}

std::pair<Index, Index> parse_window2d(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw ParameterError("--window2d expects Lx,Ly");
    return {static_cast<Index>(parse_real(text.substr(0, comma))),
            static_cast<Index>(parse_real(text.substr(comma + 1)))};
}

json grouping_to_json(const GroupingResult& res) {
    json j;
    switch (res.method) {
        case IdMethod::Trend: j["measure"] = "T"; break;
        case IdMethod::Freq: j["measure"] = "rho"; break;
        case IdMethod::Angle: j["measure"] = "tau"; break;
    }
    if (!std::isnan(res.threshold)) j["threshold"] = res.threshold;
    j["candidates"] = res.candidates;
    json pairs = json::array();
    for (auto [a, b] : res.pairs) pairs.push_back({a, b});
    j["pairs"] = pairs;
    j["singletons"] = res.singletons;
    j["indices"] = res.indices();
    j["excluded"] = res.excluded;
    if (!res.trend_measure.empty()) j["trend_measure"] = res.trend_measure;
    if (!res.argmax_theta.empty()) j["argmax_theta"] = res.argmax_theta;
    if (!res.j1.empty()) {
        json j1 = json::array();
        for (auto [a, b] : res.j1) j1.push_back({a, b});
        j["j1"] = j1;
        j["rho_pairs"] = res.rho_pairs;
    }
    if (!res.j2.empty()) {
        j["j2"] = res.j2;
        j["rho_singles"] = res.rho_singles;
    }
    if (!res.tau_pairs.empty()) {
        j["tau_pairs"] = res.tau_pairs;
        j["surviving"] = res.surviving;
        j["tau_sorted"] = res.tau_sorted;
    }
    return j;
}

// ---------------------------------------------------------------------------
// decompose

enum class InputKind { OneD, Mssa, TwoD };

int cmd_decompose(const CommonOpts& opt) {
    const CsvTable table = read_csv(opt.input);
    InputKind kind = InputKind::OneD;
    if (!opt.window2d.empty())
        kind = InputKind::TwoD;
    else if (table.columns > 1)
        kind = InputKind::Mssa;

    DecomposeOptions dopts;
    dopts.rank_tol = opt.rank_tol;
    dopts.max_rank = opt.max_rank;

    json config{{"subcommand", "decompose"},
                {"input", opt.input},
                {"rank_tol", opt.rank_tol},
                {"max_rank", opt.max_rank},
                {"format", opt.format.empty() ? "json" : opt.format}};

    std::optional<Decomposition> dec;
    if (kind == InputKind::TwoD) {
        const auto [wx, wy] = parse_window2d(opt.window2d);
        config["window2d"] = {wx, wy};
        dec = decompose(embed_2d(csv_to_field(table, opt.input), wx, wy), dopts);
    } else if (kind == InputKind::Mssa) {
        if (opt.window <= 0) throw ParameterError("decompose: --window/-L is required");
        config["window"] = opt.window;
        dec = decompose(embed_mssa(csv_to_multi(table, opt.input), opt.window), dopts);
    } else {
        if (opt.window <= 0) throw ParameterError("decompose: --window/-L is required");
        config["window"] = opt.window;
        dec = decompose(embed_1d(csv_to_series(table, opt.input), opt.window), dopts);
    }
    config["kind"] = kind == InputKind::TwoD ? "2d" : (kind == InputKind::Mssa ? "mssa" : "1d");

    json components = json::array();
    for (Index i = 1; i <= dec->size(); ++i) {
        json c{{"index", i}, {"sigma", dec->sigma(i)}, {"lambda", dec->lambda(i)}};
        if (kind == InputKind::TwoD) {
            const Periodogram2D pg = periodogram_2d(left_field(*dec, i));
            Index bk = 0, bl = 0;
            double best = -1.0;
            for (Index k = 0; k < pg.power.rows(); ++k)
                for (Index l = 0; l < pg.power.cols(); ++l)
                    if (pg.normalized(k, l) > best) {
                        best = pg.normalized(k, l);
                        bk = k;
                        bl = l;
                    }
            c["theta"] = {pg.freq_x(bk), pg.freq_y(bl)};
        } else {
            const Periodogram pg = periodogram_1d(dec->u(i));
            if (!pg.degenerate) c["theta"] = argmax_frequency(pg).theta;
        }
        components.push_back(std::move(c));
    }

    const std::string format = opt.format.empty() ? "json" : opt.format;
    if (format == "json") {
        json out{{"config", config}, {"d", dec->rank()}, {"stored", dec->size()},
                 {"components", components}};
        write_text(opt.output, out.dump(2) + "\n");
    } else {
        std::string text = config_comment(config);
        if (format == "md") {
            text += "| index | sigma | lambda | theta |\n|---|---|---|---|\n";
            for (const auto& c : components)
                text += "| " + c.at("index").dump() + " | " + fmt17(c.at("sigma")) + " | " +
                        fmt17(c.at("lambda")) + " | " +
                        (c.contains("theta") ? c.at("theta").dump() : "") + " |\n";
        } else {
            text += "index,sigma,lambda,theta\n";
            for (const auto& c : components)
                text += c.at("index").dump() + "," + fmt17(c.at("sigma")) + "," +
                        fmt17(c.at("lambda")) + "," +
                        (c.contains("theta") && c.at("theta").is_number()
                             ? fmt17(c.at("theta"))
                             : "") + "\n";
        }
        write_text(opt.output, text);
    }

    if (opt.recon) {
        if (kind == InputKind::TwoD) {
            for (Index i = 1; i <= dec->size(); ++i) {
                const Matrix e = std::get<Matrix>(elementary_component(*dec, i));
                std::string text = config_comment(config);
                for (Index r = 0; r < e.rows(); ++r) {
                    for (Index c = 0; c < e.cols(); ++c)
                        text += (c ? "," : "") + fmt17(e(r, c));
                    text += "\n";
                }
                write_text(sibling_path(opt.output, "_recon_c" + std::to_string(i)), text);
            }
        } else if (kind == InputKind::Mssa) {
            std::vector<MultiSeries> elem;
            for (Index i = 1; i <= dec->size(); ++i)
                elem.push_back(std::get<MultiSeries>(elementary_component(*dec, i)));
            for (Index p = 0; p < elem.front().channel_count(); ++p) {
                std::string text = config_comment(config);
                const Index len = elem.front().length(p);
                for (Index r = 0; r < len; ++r) {
                    for (std::size_t i = 0; i < elem.size(); ++i)
                        text += (i ? "," : "") +
                                fmt17(elem[i].channels[static_cast<std::size_t>(p)][r]);
                    text += "\n";
                }
                write_text(sibling_path(opt.output, "_recon_ch" + std::to_string(p + 1)), text);
            }
        } else {
            std::string text = config_comment(config);
            std::vector<Vector> elem;
            for (Index i = 1; i <= dec->size(); ++i)
                elem.push_back(std::get<Vector>(elementary_component(*dec, i)));
            for (Index r = 0; r < elem.front().size(); ++r) {
                for (std::size_t i = 0; i < elem.size(); ++i)
                    text += (i ? "," : "") + fmt17(elem[i][r]);
                text += "\n";
            }
            write_text(sibling_path(opt.output, "_recon"), text);
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// identify

int cmd_identify(const CommonOpts& opt) {
    static const std::vector<std::string> kMethods{
        "trend-1d",  "trend-mssa-left",  "trend-mssa-right",  "trend-2d",
        "freq-1d",   "freq-mssa-left",   "freq-mssa-right",
        "angle-1d",  "angle-mssa-left",  "angle-mssa-right"};
    if (opt.method == "angle-2d" || opt.method == "freq-2d")
        throw ParameterError("unsupported combination: only the trend method generalizes to 2D");
    if (std::find(kMethods.begin(), kMethods.end(), opt.method) == kMethods.end())
        throw ParameterError("unknown method '" + opt.method + "'");

    const bool is_trend = opt.method.rfind("trend", 0) == 0;
    const bool is_freq = opt.method.rfind("freq", 0) == 0;
    const bool is_angle = opt.method.rfind("angle", 0) == 0;
    const bool is_2d = opt.method.find("-2d") != std::string::npos;
    const bool is_mssa = opt.method.find("mssa") != std::string::npos;
    const bool is_right = opt.method.find("right") != std::string::npos;

    std::string source = opt.source;
    if (source.empty()) source = is_right ? "factor" : "eigen";
    if (source != "eigen" && source != "factor" && source != "recon")
        throw ParameterError("--source must be one of eigen, factor, recon");
    if (is_right && source == "eigen")
        throw ParameterError("right-vector methods need --source factor or recon");
    if (!is_right && !is_2d && source != "eigen" && !is_trend)
        throw ParameterError("method '" + opt.method + "' expects --source eigen");
    if (is_right && source == "recon" && !is_trend)
        throw ParameterError("only the trend method accepts elementary series as input");

    TrendIdConfig tcfg;
    FreqIdConfig fcfg{.s0 = opt.s0, .rho0 = opt.rho0};
    AngleIdConfig acfg;
    double omega1 = 0.0, omega2 = 0.5;
    if (!opt.omega_text.empty()) omega1 = parse_real(opt.omega_text);
    if (!opt.omega2_text.empty()) omega2 = parse_real(opt.omega2_text);
    if (is_trend) {
        // the single-omega trend form is the bin [0, omega)
        if (opt.omega2_text.empty() && !opt.omega_text.empty()) {
            omega2 = omega1;
            omega1 = 0.0;
        }
        tcfg.omega1 = omega1;
        tcfg.omega2 = omega2;
        tcfg.threshold = opt.threshold < 0.0 ? 0.9 : opt.threshold;
    }
    if (is_angle) {
        if (opt.m > 0 && !opt.t0_text.empty())
            throw ParameterError("give either --m or --t0, not both");
        acfg = opt.m > 0 ? AngleIdConfig::by_count(opt.m)
                         : AngleIdConfig::by_threshold(
                               opt.t0_text.empty() ? 0.01 : parse_real(opt.t0_text));
    }

    json config{{"subcommand", "identify"}, {"input", opt.input}, {"method", opt.method},
                {"source", source},         {"s0", opt.s0},       {"rho0", opt.rho0},
                {"format", "json"}};
    if (is_trend) {
        config["omega"] = tcfg.omega1;
        config["omega2"] = tcfg.omega2;
        config["threshold"] = tcfg.threshold;
    }
    if (is_angle) {
        if (opt.m > 0)
            config["m"] = opt.m;
        else
            config["t0"] = acfg.t0;
    }

    const CsvTable table = read_csv(opt.input);
    GroupingResult res;
    std::vector<Vector> scatter_vectors;  // adjacent-pair scatter data (angle family)

    DecomposeOptions dopts;
    dopts.rank_tol = opt.rank_tol;
    dopts.max_rank = opt.max_rank;

    if (is_2d) {
        if (opt.window2d.empty()) throw ParameterError("2D methods need --window2d Lx,Ly");
        const auto [wx, wy] = parse_window2d(opt.window2d);
        config["window2d"] = {wx, wy};
        const auto dec = decompose(embed_2d(csv_to_field(table, opt.input), wx, wy), dopts);
        const Index count = opt.components > 0 ? std::min(opt.components, dec.rank())
                                               : dec.rank();
        const SourceKind kind = source == "eigen"
                                    ? SourceKind::Eigenvectors
                                    : (source == "factor" ? SourceKind::FactorVectors
                                                          : SourceKind::Reconstructed);
        res = identify_trend_2d(candidates_2d(dec, kind, count), tcfg.omega1, tcfg.omega2,
                                tcfg.threshold);
    } else if (is_mssa) {
        if (opt.window <= 0) throw ParameterError("identify: --window/-L is required");
        config["window"] = opt.window;
        const auto dec = decompose(embed_mssa(csv_to_multi(table, opt.input), opt.window), dopts);
        const Index count = opt.components > 0 ? std::min(opt.components, dec.rank())
                                               : dec.rank();
        if (is_right) {
            if (is_trend && source == "recon") {
                std::vector<MultiSeries> elem;
                for (Index i = 1; i <= count; ++i)
                    elem.push_back(std::get<MultiSeries>(elementary_component(dec, i)));
                res = identify_trend_mssa_right(elem, tcfg);
            } else {
                std::vector<FactorVectorParts> parts;
                for (Index i = 1; i <= count; ++i) parts.push_back(factor_parts(dec, i));
                if (is_trend)
                    res = identify_trend_mssa_right(parts, tcfg);
                else if (is_freq)
                    res = identify_periodic_freq_mssa_right(parts, fcfg);
                else
                    res = identify_periodic_angle_mssa_right(parts, acfg);
            }
        } else {
            const auto u = dec.left_vectors(count);
            if (is_trend)
                res = identify_trend_mssa_left(u, tcfg);
            else if (is_freq)
                res = identify_periodic_freq_mssa_left(u, fcfg);
            else {
                res = identify_periodic_angle_mssa_left(u, acfg);
                scatter_vectors = u;
            }
        }
    } else {
        if (opt.window <= 0) throw ParameterError("identify: --window/-L is required");
        config["window"] = opt.window;
        const auto dec = decompose(embed_1d(csv_to_series(table, opt.input), opt.window), dopts);
        const Index count = opt.components > 0 ? std::min(opt.components, dec.rank())
                                               : dec.rank();
        std::vector<Vector> items;
        if (source == "eigen")
            items = dec.left_vectors(count);
        else if (source == "factor")
            items = dec.right_vectors(count);
        else
            for (Index i = 1; i <= count; ++i)
                items.push_back(std::get<Vector>(elementary_component(dec, i)));
        if (is_trend)
            res = identify_trend(items, tcfg);
        else if (is_freq)
            res = identify_periodic_freq(items, fcfg);
        else {
            res = identify_periodic_angle(items, acfg);
            scatter_vectors = items;
        }
    }

    json out{{"config", config}, {"result", grouping_to_json(res)}};
    write_text(opt.output, out.dump(2) + "\n");

    // 2D-diagram point data for the angle family: scatter of U_j vs U_{j+1}
    if (!scatter_vectors.empty()) {
        std::string text = config_comment(config);
        text += "pair,k,p,q\n";
        for (std::size_t j = 0; j + 1 < scatter_vectors.size(); ++j)
            for (Index k = 0; k < scatter_vectors[j].size(); ++k)
                text += std::to_string(j + 1) + "," + std::to_string(k + 1) + "," +
                        fmt17(scatter_vectors[j][k]) + "," + fmt17(scatter_vectors[j + 1][k]) +
                        "\n";
        const std::string path = sibling_path(opt.output, "_pairs");
        if (!path.empty()) write_text(path.ends_with(".csv") ? path : path + ".csv", text);
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// calibrate

int cmd_calibrate(const CommonOpts& opt, Index n_flag, double alpha, double amp, double phase) {
    CalibrationConfig cfg;
    cfg.model.n = n_flag;
    cfg.model.a = amp;
    cfg.model.alpha = alpha;
    cfg.model.omega = opt.omega_text.empty() ? 0.2 : parse_real(opt.omega_text);
    cfg.model.phi = phase;
    cfg.window = opt.window > 0 ? opt.window : 50;
    if (opt.sigma_grid_text.empty()) throw ParameterError("calibrate: --sigma-grid is required");
    cfg.sigma_grid = parse_grid(opt.sigma_grid_text);
    cfg.n_sim = opt.nsim;
    cfg.seed = resolve_seed(opt.seed_text);
    cfg.threads = opt.threads;

    const auto res = calibrate_threshold(cfg);

    json config{{"subcommand", "calibrate"},
                {"length", cfg.model.n},
                {"window", cfg.window},
                {"omega", cfg.model.omega},
                {"alpha", cfg.model.alpha},
                {"amp", cfg.model.a},
                {"phase", cfg.model.phi},
                {"nsim", cfg.n_sim},
                {"seed", cfg.seed},
                {"threads", cfg.threads}};

    const std::string format = opt.format.empty() ? "csv" : opt.format;
    if (format == "json") {
        json out{{"config", config},
                 {"sigma", res.sigma},
                 {"q95", res.q95},
                 {"dropped", res.dropped},
                 {"recommended_t0", res.recommended_t0}};
        write_text(opt.output, out.dump(2) + "\n");
        return kExitOk;
    }
    std::string text = config_comment(config);
    if (format == "md") {
        text += "| sigma | q95 | dropped |\n|---|---|---|\n";
        for (std::size_t s = 0; s < res.sigma.size(); ++s)
            text += "| " + fmt17(res.sigma[s]) + " | " + fmt17(res.q95[s]) + " | " +
                    std::to_string(res.dropped[s]) + " |\n";
    } else {
        text += "sigma,q95,dropped\n";
        for (std::size_t s = 0; s < res.sigma.size(); ++s)
            text += fmt17(res.sigma[s]) + "," + fmt17(res.q95[s]) + "," +
                    std::to_string(res.dropped[s]) + "\n";
    }
    write_text(opt.output, text);

    json summary{{"config", config}, {"recommended_t0", res.recommended_t0}};
    const std::string jpath = sibling_path(opt.output, "_t0");
    if (!jpath.empty())
        write_text(jpath.ends_with(".json") ? jpath : jpath + ".json", summary.dump(2) + "\n");
    return kExitOk;
}

// ---------------------------------------------------------------------------
// compare

int cmd_compare(const CommonOpts& opt, Index n_flag, double alpha, double amp, double phase) {
    ComparisonConfig cfg;
    cfg.model.n = n_flag;
    cfg.model.a = amp;
    cfg.model.alpha = alpha;
    cfg.model.omega = opt.omega_text.empty() ? 1.0 / 7.0 : parse_real(opt.omega_text);
    cfg.model.phi = phase;
    cfg.window = opt.window > 0 ? opt.window : 50;
    cfg.sigma_grid = opt.sigma_grid_text.empty()
                         ? std::vector<double>{0.2, 0.4, 0.6, 0.8, 1.0}
                         : parse_grid(opt.sigma_grid_text);
    cfg.n_rep = opt.nrep;
    cfg.seed = resolve_seed(opt.seed_text);
    cfg.s0 = opt.s0;
    cfg.threads = opt.threads;

    const auto report = compare_methods(cfg);

    json config{{"subcommand", "compare"},
                {"length", cfg.model.n},
                {"window", cfg.window},
                {"omega", cfg.model.omega},
                {"alpha", cfg.model.alpha},
                {"amp", cfg.model.a},
                {"phase", cfg.model.phi},
                {"nrep", cfg.n_rep},
                {"seed", cfg.seed},
                {"s0", cfg.s0},
                {"threads", cfg.threads}};

    const std::string format = opt.format.empty() ? "md" : opt.format;
    if (format == "json") {
        json rows = json::array();
        for (const auto& row : report.rows)
            rows.push_back({{"sigma", row.sigma},
                            {"mean_tau", row.mean_tau},
                            {"mean_rho", row.mean_rho},
                            {"median_tau", row.median_tau},
                            {"median_rho", row.median_rho},
                            {"excluded", row.excluded}});
        json thresholds = json::array();
        for (std::size_t s = 0; s < report.reps.size(); ++s) {
            json t0s = json::array(), rho0s = json::array();
            for (const auto& rec : report.reps[s]) {
                if (!rec.ok) continue;
                t0s.push_back(rec.t_opt);
                rho0s.push_back(rec.rho_opt);
            }
            thresholds.push_back({{"sigma", report.rows[s].sigma},
                                  {"t0_opt", t0s},
                                  {"rho0_opt", rho0s}});
        }
        json out{{"config", config}, {"rows", rows}, {"thresholds", thresholds}};
        write_text(opt.output, out.dump(2) + "\n");
        return kExitOk;
    }
    std::string text = config_comment(config);
    if (format == "md") {
        text += "| sigma | mean_tau | mean_rho | median_tau | median_rho | excluded |\n";
        text += "|---|---|---|---|---|---|\n";
        for (const auto& row : report.rows)
            text += "| " + fmt17(row.sigma) + " | " + fmt17(row.mean_tau) + " | " +
                    fmt17(row.mean_rho) + " | " + fmt17(row.median_tau) + " | " +
                    fmt17(row.median_rho) + " | " + std::to_string(row.excluded) + " |\n";
    } else {
        text += "sigma,mean_tau,mean_rho,median_tau,median_rho,excluded\n";
        for (const auto& row : report.rows)
            text += fmt17(row.sigma) + "," + fmt17(row.mean_tau) + "," + fmt17(row.mean_rho) +
                    "," + fmt17(row.median_tau) + "," + fmt17(row.median_rho) + "," +
                    std::to_string(row.excluded) + "\n";
    }
    write_text(opt.output, text);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"singular spectrum analysis with automated eigentriple grouping"};
    app.require_subcommand(1);

    CommonOpts opt;
    Index n_flag = 99;
    double alpha = 0.0, amp = 1.0, phase = 0.0;

    auto add_io = [&](CLI::App* cmd, bool needs_input) {
        if (needs_input) cmd->add_option("--input,-i", opt.input, "input CSV")->required();
        cmd->add_option("--output,-o", opt.output, "output path (default: stdout)");
        cmd->add_option("--format", opt.format, "json, csv or md");
        cmd->add_option("--threads", opt.threads, "worker threads for experiments");
    };

    auto* dec = app.add_subcommand("decompose", "embed and decompose a series or field");
    add_io(dec, true);
    dec->add_option("--window,-L", opt.window, "window length");
    dec->add_option("--window2d", opt.window2d, "2D window Lx,Ly");
    dec->add_option("--rank-tol", opt.rank_tol, "relative rank tolerance");
    dec->add_option("--max-rank", opt.max_rank, "cap on stored eigentriples");
    dec->add_flag("--recon", opt.recon, "also write elementary reconstructions");

    auto* ide = app.add_subcommand("identify", "run a grouping method on a decomposition");
    add_io(ide, true);
    ide->add_option("--window,-L", opt.window, "window length");
    ide->add_option("--window2d", opt.window2d, "2D window Lx,Ly");
    ide->add_option("--method", opt.method,
                    "trend|freq|angle x 1d|mssa-left|mssa-right, or trend-2d")
        ->required();
    ide->add_option("--source", opt.source, "eigen, factor or recon");
    ide->add_option("--omega", opt.omega_text, "trend bin bound (or lower bound)");
    ide->add_option("--omega2", opt.omega2_text, "trend bin upper bound");
    ide->add_option("--threshold", opt.threshold, "trend threshold T0");
    ide->add_option("--s0", opt.s0, "frequency-method grid slack");
    ide->add_option("--rho0", opt.rho0, "frequency-method threshold");
    ide->add_option("--t0", opt.t0_text, "angle-method threshold");
    ide->add_option("--m", opt.m, "angle-method expected harmonic count");
    ide->add_option("--components", opt.components, "use only the leading components");
    ide->add_option("--rank-tol", opt.rank_tol, "relative rank tolerance");
    ide->add_option("--max-rank", opt.max_rank, "cap on stored eigentriples");

    auto* cal = app.add_subcommand("calibrate", "95% quantile of tau over noise levels");
    add_io(cal, false);
    cal->add_option("--length,-N", n_flag, "series length");
    cal->add_option("--window,-L", opt.window, "window length");
    cal->add_option("--omega", opt.omega_text, "harmonic frequency (accepts p/q)");
    cal->add_option("--alpha", alpha, "modulation rate");
    cal->add_option("--amp", amp, "harmonic amplitude");
    cal->add_option("--phase", phase, "harmonic phase");
    cal->add_option("--sigma-grid", opt.sigma_grid_text, "noise levels, list or a:b:step")
        ->required();
    cal->add_option("--nsim", opt.nsim, "replications per noise level");
    cal->add_option("--seed", opt.seed_text, "master seed (env SSAKIT_SEED, default 42)");

    auto* cmp = app.add_subcommand("compare", "angle vs frequency identification errors");
    add_io(cmp, false);
    cmp->add_option("--length,-N", n_flag, "series length");
    cmp->add_option("--window,-L", opt.window, "window length");
    cmp->add_option("--omega", opt.omega_text, "harmonic frequency (accepts p/q)");
    cmp->add_option("--alpha", alpha, "modulation rate");
    cmp->add_option("--amp", amp, "harmonic amplitude");
    cmp->add_option("--phase", phase, "harmonic phase");
    cmp->add_option("--sigma-grid", opt.sigma_grid_text, "noise levels, list or a:b:step");
    cmp->add_option("--nrep", opt.nrep, "replication pairs per noise level");
    cmp->add_option("--s0", opt.s0, "frequency-method grid slack");
    cmp->add_option("--seed", opt.seed_text, "master seed (env SSAKIT_SEED, default 42)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(dec)) return cmd_decompose(opt);
        if (app.got_subcommand(ide)) return cmd_identify(opt);
        if (app.got_subcommand(cal)) return cmd_calibrate(opt, n_flag, alpha, amp, phase);
        return cmd_compare(opt, n_flag, alpha, amp, phase);
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
}
