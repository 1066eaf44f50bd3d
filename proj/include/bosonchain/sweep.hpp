#pragma once

#include "bosonchain/dynamics.hpp"
#include "bosonchain/gaussian.hpp"
#include "bosonchain/model.hpp"
#include "bosonchain/spectral.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace bosonchain {

enum class Observable {
    Entropy,            // S_A on the half chain
    MutualInformation,  // I_BC between the separated inner regions
    Negativity,         // N_A across the half-chain cut
    CorrelationElement, // Gamma_{x_{L/2}, x_L}
    EntropyProfile,     // S(l) for every cut l = 1..L-1
};

struct SweepConfig {
    // model template (swept fields excluded)
    double omega = 1.0;
    double coupling_strength = 1.0;
    double eta = 1.0;
    Coupling range = Coupling::LongRange;
    Measurement measurement = Measurement::Local;
    // swept axes
    std::vector<double> alphas;
    std::vector<double> gammas;
    std::vector<int> sizes;
    // recorded observables
    std::set<Observable> observables{Observable::Entropy};
    IntegratorConfig integrator;
    int workers = 1;
    std::string output_dir = ".";
    unsigned long seed = 0;      // stochastic demos only
    bool resume = false;
    bool no_timing = false;      // zero the wall-time column for byte-stable output
};

struct ResultRecord {
    double alpha = 0.0;
    double gamma = 0.0;
    int size = 0;
    Measurement measurement = Measurement::Local;
    double eta = 1.0;
    bool converged = false;
    std::optional<double> entropy_half;
    std::optional<double> mutual_information;
    std::optional<double> negativity_half;
    std::optional<double> corr_mid_end;
    double residual = 0.0;
    double walltime_s = 0.0;
    std::vector<double> entropy_profile;  // JSON output only, not part of the CSV schema

    bool operator==(const ResultRecord& o) const {
        auto opt_eq = [](const std::optional<double>& a, const std::optional<double>& b) {
            if (a.has_value() != b.has_value())
                return false;
            return !a || *a == *b;
        };
        return alpha == o.alpha && gamma == o.gamma && size == o.size &&
               measurement == o.measurement && eta == o.eta && converged == o.converged &&
               opt_eq(entropy_half, o.entropy_half) &&
               opt_eq(mutual_information, o.mutual_information) &&
               opt_eq(negativity_half, o.negativity_half) &&
               opt_eq(corr_mid_end, o.corr_mid_end) && residual == o.residual &&
               walltime_s == o.walltime_s;
    }
};

namespace detail {

inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a])))
        ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1])))
        --b;
    return s.substr(a, b - a);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(cur);
    if (!s.empty() && s.back() == sep)
        out.push_back("");
    return out;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out)
            throw std::runtime_error("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

// ordering key: lexicographic in (alpha, gamma, L, measurement, eta)
inline bool tuple_less(const ResultRecord& a, const ResultRecord& b) {
    if (a.alpha != b.alpha)
        return a.alpha < b.alpha;
    if (a.gamma != b.gamma)
        return a.gamma < b.gamma;
    if (a.size != b.size)
        return a.size < b.size;
    if (a.measurement != b.measurement)
        return a.measurement < b.measurement;
    return a.eta < b.eta;
}

inline std::string tuple_key(double alpha, double gamma, int size, Measurement m, double eta) {
    return format_g17(alpha) + "|" + format_g17(gamma) + "|" + std::to_string(size) + "|" +
           to_string(m) + "|" + format_g17(eta);
}

}  // namespace detail

inline Observable parse_observable(const std::string& name) {
    if (name == "entropy")
        return Observable::Entropy;
    if (name == "mutual_information")
        return Observable::MutualInformation;
    if (name == "negativity")
        return Observable::Negativity;
    if (name == "correlation_element")
        return Observable::CorrelationElement;
    if (name == "entropy_profile")
        return Observable::EntropyProfile;
    throw std::invalid_argument("unknown observable: " + name);
}

inline void validate_config(const SweepConfig& cfg) {
    if (cfg.alphas.empty() || cfg.gammas.empty() || cfg.sizes.empty())
        throw std::invalid_argument("sweep config: every axis (alpha, gamma, sizes) needs at least one value");
    if (!(cfg.omega > 0.0) || !(cfg.coupling_strength > 0.0))
        throw std::invalid_argument("sweep config: omega and k must be positive");
    if (cfg.eta < 0.0 || cfg.eta > 1.0)
        throw std::invalid_argument("sweep config: eta must lie in [0, 1]");
    if (cfg.workers < 1)
        throw std::invalid_argument("sweep config: workers must be >= 1");
    for (double a : cfg.alphas)
        if (!(a > 0.0))
            throw std::invalid_argument("sweep config: alpha values must be positive");
    for (double g : cfg.gammas)
        if (g < 0.0)
            throw std::invalid_argument("sweep config: gamma values must be nonnegative");
    for (int L : cfg.sizes) {
        if (L < 1)
            throw std::invalid_argument("sweep config: sizes must be >= 1");
        if (cfg.observables.count(Observable::MutualInformation) && (L % 2 != 0 || L < 16))
            throw std::invalid_argument(
                "sweep config: mutual_information needs even sizes >= 16");
    }
}

// Key = value text config.  Lists are comma separated; '#' starts a comment;
// unknown keys are errors.
inline SweepConfig parse_sweep_config(std::istream& in) {
    SweepConfig cfg;
    cfg.observables.clear();
    std::string line;
    int lineno = 0;
    bool saw_observables = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        auto as_double = [&](const std::string& v) {
            std::size_t pos = 0;
            const double d = std::stod(v, &pos);
            if (pos != v.size())
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": bad number '" + v + "'");
            return d;
        };
        auto as_double_list = [&](const std::string& v) {
            std::vector<double> out;
            for (const auto& piece : detail::split(v, ','))
                out.push_back(as_double(detail::trim(piece)));
            return out;
        };
        if (key == "alpha") {
            cfg.alphas = as_double_list(value);
        } else if (key == "gamma") {
            cfg.gammas = as_double_list(value);
        } else if (key == "sizes") {
            for (double d : as_double_list(value)) {
                if (d != std::floor(d))
                    throw std::invalid_argument("config line " + std::to_string(lineno) +
                                                ": sizes must be integers");
                cfg.sizes.push_back(static_cast<int>(d));
            }
        } else if (key == "omega") {
            cfg.omega = as_double(value);
        } else if (key == "k") {
            cfg.coupling_strength = as_double(value);
        } else if (key == "eta") {
            cfg.eta = as_double(value);
        } else if (key == "measurement") {
            if (value == "local")
                cfg.measurement = Measurement::Local;
            else if (value == "nonlocal")
                cfg.measurement = Measurement::Nonlocal;
            else
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": measurement must be local or nonlocal");
        } else if (key == "range") {
            if (value == "longrange")
                cfg.range = Coupling::LongRange;
            else if (value == "nearest")
                cfg.range = Coupling::NearestNeighbor;
            else
                throw std::invalid_argument("config line " + std::to_string(lineno) +
                                            ": range must be longrange or nearest");
        } else if (key == "observables") {
            saw_observables = true;
            for (const auto& piece : detail::split(value, ','))
                cfg.observables.insert(parse_observable(detail::trim(piece)));
        } else if (key == "dt") {
            cfg.integrator.dt = as_double(value);
        } else if (key == "t_max") {
            cfg.integrator.t_max = as_double(value);
        } else if (key == "steady_tol") {
            cfg.integrator.steady_tol = as_double(value);
        } else if (key == "workers") {
            cfg.workers = static_cast<int>(as_double(value));
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else if (key == "seed") {
            cfg.seed = static_cast<unsigned long>(as_double(value));
        } else {
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": unknown key '" + key + "'");
        }
    }
    if (!saw_observables)
        cfg.observables = {Observable::Entropy};
    validate_config(cfg);
    return cfg;
}

inline SweepConfig parse_sweep_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file " + path);
    return parse_sweep_config(in);
}

// ---------------------------------------------------------------------------
// CSV serialization (schema shared by the journal and the final dataset)

inline const char* csv_header() {
    return "alpha,gamma,L,measurement,eta,converged,S_A,I_BC,N_A,corr_mid_end,residual,walltime_s";
}

inline std::string to_csv_row(const ResultRecord& r) {
    auto opt = [](const std::optional<double>& v) {
        return v ? detail::format_g17(*v) : std::string();
    };
    std::string row;
    row += detail::format_g17(r.alpha);
    row += ',';
    row += detail::format_g17(r.gamma);
    row += ',';
    row += std::to_string(r.size);
    row += ',';
    row += to_string(r.measurement);
    row += ',';
    row += detail::format_g17(r.eta);
    row += ',';
    row += r.converged ? "1" : "0";
    row += ',';
    row += opt(r.entropy_half);
    row += ',';
    row += opt(r.mutual_information);
    row += ',';
    row += opt(r.negativity_half);
    row += ',';
    row += opt(r.corr_mid_end);
    row += ',';
    row += detail::format_g17(r.residual);
    row += ',';
    row += detail::format_g17(r.walltime_s);
    return row;
}

inline ResultRecord parse_csv_row(const std::string& line) {
    const auto fields = detail::split(line, ',');
    if (fields.size() != 12)
        throw std::invalid_argument("result row: expected 12 fields, got " +
                                    std::to_string(fields.size()));
    auto opt = [](const std::string& f) -> std::optional<double> {
        if (detail::trim(f).empty())
            return std::nullopt;
        return std::stod(f);
    };
    ResultRecord r;
    r.alpha = std::stod(fields[0]);
    r.gamma = std::stod(fields[1]);
    r.size = std::stoi(fields[2]);
    if (fields[3] == "local")
        r.measurement = Measurement::Local;
    else if (fields[3] == "nonlocal")
        r.measurement = Measurement::Nonlocal;
    else
        throw std::invalid_argument("result row: bad measurement field '" + fields[3] + "'");
    r.eta = std::stod(fields[4]);
    r.converged = fields[5] == "1";
    r.entropy_half = opt(fields[6]);
    r.mutual_information = opt(fields[7]);
    r.negativity_half = opt(fields[8]);
    r.corr_mid_end = opt(fields[9]);
    r.residual = std::stod(fields[10]);
    r.walltime_s = std::stod(fields[11]);
    return r;
}

inline std::string emit_csv(const std::vector<ResultRecord>& records) {
    std::string out = csv_header();
    out += '\n';
    for (const auto& r : records) {
        out += to_csv_row(r);
        out += '\n';
    }
    return out;
}

inline std::vector<ResultRecord> parse_csv(std::istream& in) {
    std::vector<ResultRecord> records;
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("result CSV: empty input");
    if (detail::trim(line) != csv_header())
        throw std::invalid_argument("result CSV: unexpected header");
    while (std::getline(in, line)) {
        if (detail::trim(line).empty())
            continue;
        records.push_back(parse_csv_row(line));
    }
    return records;
}

inline std::vector<ResultRecord> load_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open " + path);
    return parse_csv(in);
}

inline nlohmann::json to_json(const ResultRecord& r) {
    nlohmann::json j;
    j["alpha"] = r.alpha;
    j["gamma"] = r.gamma;
    j["L"] = r.size;
    j["measurement"] = to_string(r.measurement);
    j["eta"] = r.eta;
    j["converged"] = r.converged;
    j["S_A"] = r.entropy_half ? nlohmann::json(*r.entropy_half) : nlohmann::json(nullptr);
    j["I_BC"] = r.mutual_information ? nlohmann::json(*r.mutual_information) : nlohmann::json(nullptr);
    j["N_A"] = r.negativity_half ? nlohmann::json(*r.negativity_half) : nlohmann::json(nullptr);
    j["corr_mid_end"] = r.corr_mid_end ? nlohmann::json(*r.corr_mid_end) : nlohmann::json(nullptr);
    j["residual"] = r.residual;
    j["walltime_s"] = r.walltime_s;
    if (!r.entropy_profile.empty())
        j["entropy_profile"] = r.entropy_profile;
    return j;
}

inline std::string emit_json(const std::vector<ResultRecord>& records) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records)
        arr.push_back(to_json(r));
    return arr.dump(2) + "\n";
}

enum class DatasetFormat { Csv, Json };

inline std::filesystem::path emit_dataset(const std::vector<ResultRecord>& records,
                                          DatasetFormat format,
                                          const std::filesystem::path& output_dir) {
    if (records.empty())
        throw std::invalid_argument("emit_dataset: no records");
    std::vector<ResultRecord> sorted = records;
    std::sort(sorted.begin(), sorted.end(), detail::tuple_less);
    std::filesystem::create_directories(output_dir);
    const std::filesystem::path path =
        output_dir / (format == DatasetFormat::Csv ? "results.csv" : "results.json");
    detail::write_file_atomic(path, format == DatasetFormat::Csv ? emit_csv(sorted)
                                                                 : emit_json(sorted));
    return path;
}

// ---------------------------------------------------------------------------
// sweep execution

namespace detail {

struct GridPoint {
    double alpha, gamma;
    int size;
};

inline ResultRecord solve_point(const SweepConfig& cfg, const GridPoint& pt) {
    ResultRecord rec;
    rec.alpha = pt.alpha;
    rec.gamma = pt.gamma;
    rec.size = pt.size;
    rec.measurement = cfg.measurement;
    rec.eta = cfg.eta;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        ModelSpec spec;
        spec.sites = pt.size;
        spec.alpha = pt.alpha;
        spec.omega = cfg.omega;
        spec.coupling = cfg.coupling_strength;
        spec.range = cfg.range;
        spec.measurement = cfg.measurement;
        spec.gamma = pt.gamma;
        spec.eta = cfg.eta;
        IntegratorConfig icfg = cfg.integrator;
        if (!(icfg.dt > 0.0))
            icfg.dt = suggested_timestep(spec);
        if (!(icfg.t_max > 0.0))
            icfg.t_max = suggested_t_max(spec, icfg.steady_tol);
        const auto result = steady_state(spec, icfg);
        rec.converged = result.converged;
        rec.residual = result.residual;
        const CovarianceState& st = result.state;
        const int L = pt.size;
        const int half = L / 2;
        if (cfg.observables.count(Observable::Entropy))
            rec.entropy_half = half > 0 ? entanglement_entropy(st, contiguous_region(1, half)) : 0.0;
        if (cfg.observables.count(Observable::MutualInformation))
            rec.mutual_information = mutual_information(st, inner_region_b(L), inner_region_c(L));
        if (cfg.observables.count(Observable::Negativity) || cfg.eta < 1.0)
            rec.negativity_half = half > 0 ? log_negativity(st, contiguous_region(1, half)) : 0.0;
        if (cfg.observables.count(Observable::CorrelationElement) && L >= 2)
            rec.corr_mid_end = st.gamma(half - 1, L - 1);
        if (cfg.observables.count(Observable::EntropyProfile)) {
            rec.entropy_profile.reserve(static_cast<std::size_t>(L > 1 ? L - 1 : 0));
            for (int l = 1; l < L; ++l)
                rec.entropy_profile.push_back(entanglement_entropy(st, contiguous_region(1, l)));
        }
    } catch (const std::exception&) {
        rec.converged = false;
        rec.residual = std::numeric_limits<double>::quiet_NaN();
        rec.entropy_half.reset();
        rec.mutual_information.reset();
        rec.negativity_half.reset();
        rec.corr_mid_end.reset();
        rec.entropy_profile.clear();
    }
    const auto t1 = std::chrono::steady_clock::now();
    rec.walltime_s = cfg.no_timing ? 0.0 : std::chrono::duration<double>(t1 - t0).count();
    return rec;
}

}  // namespace detail

struct SweepOutcome {
    std::vector<ResultRecord> records;  // grid order (lexicographic in the tuple)
    int solved = 0;                     // points computed this run that converged
    int skipped = 0;                    // points restored from the journal
    int failed = 0;                     // points computed this run, converged = false
};

// Runs every grid point through the steady-state solver.  Completed points
// are appended (one line, flushed) to <output_dir>/journal.csv as they
// finish, so an interrupted sweep resumes without recomputing them.  Final
// datasets are written sorted and atomically.
inline SweepOutcome run_sweep(const SweepConfig& cfg) {
    validate_config(cfg);
    const std::filesystem::path outdir(cfg.output_dir);
    std::filesystem::create_directories(outdir);
    const std::filesystem::path journal_path = outdir / "journal.csv";

    std::vector<detail::GridPoint> grid;
    for (double a : cfg.alphas)
        for (double g : cfg.gammas)
            for (int L : cfg.sizes)
                grid.push_back({a, g, L});
    std::sort(grid.begin(), grid.end(), [](const detail::GridPoint& a, const detail::GridPoint& b) {
        if (a.alpha != b.alpha)
            return a.alpha < b.alpha;
        if (a.gamma != b.gamma)
            return a.gamma < b.gamma;
        return a.size < b.size;
    });

    std::vector<ResultRecord> slots(grid.size());
    std::vector<char> done(grid.size(), 0);
    SweepOutcome outcome;

    if (cfg.resume && std::filesystem::exists(journal_path)) {
        std::ifstream in(journal_path);
        std::string line;
        std::getline(in, line);  // header (or torn fragment), validated loosely
        std::map<std::string, ResultRecord> seen;
        while (std::getline(in, line)) {
            if (detail::trim(line).empty())
                continue;
            try {
                ResultRecord r = parse_csv_row(line);
                seen[detail::tuple_key(r.alpha, r.gamma, r.size, r.measurement, r.eta)] = r;
            } catch (const std::exception&) {
                // torn or foreign line: ignore, the point is recomputed
            }
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto key = detail::tuple_key(grid[i].alpha, grid[i].gamma, grid[i].size,
                                               cfg.measurement, cfg.eta);
            const auto it = seen.find(key);
            if (it != seen.end()) {
                slots[i] = it->second;
                done[i] = 1;
                ++outcome.skipped;
            }
        }
    }

    std::ofstream journal;
    const bool fresh_journal = !cfg.resume || !std::filesystem::exists(journal_path);
    journal.open(journal_path, fresh_journal ? std::ios::trunc : std::ios::app);
    if (!journal)
        throw std::runtime_error("cannot open journal " + journal_path.string());
    if (fresh_journal)
        journal << csv_header() << '\n' << std::flush;

    std::atomic<std::size_t> next{0};
    std::mutex write_mutex;
    const int n_workers = std::max(1, cfg.workers);
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= grid.size())
                return;
            if (done[i])
                continue;
            ResultRecord rec = detail::solve_point(cfg, grid[i]);
            std::lock_guard<std::mutex> lock(write_mutex);
            slots[i] = std::move(rec);
            journal << to_csv_row(slots[i]) << '\n' << std::flush;
            if (slots[i].converged)
                ++outcome.solved;
            else
                ++outcome.failed;
        }
    };
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }

    outcome.records = std::move(slots);
    emit_dataset(outcome.records, DatasetFormat::Csv, outdir);
    emit_dataset(outcome.records, DatasetFormat::Json, outdir);
    return outcome;
}

}  // namespace bosonchain
