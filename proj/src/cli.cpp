#include "waveleton/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "waveleton/config.hpp"
#include "waveleton/connection.hpp"
#include "waveleton/dwt.hpp"
#include "waveleton/errors.hpp"
#include "waveleton/evolve.hpp"
#include "waveleton/filters.hpp"
#include "waveleton/grid2d.hpp"
#include "waveleton/io.hpp"
#include "waveleton/mra.hpp"
#include "waveleton/nonstandard.hpp"
#include "waveleton/patterns.hpp"
#include "waveleton/version.hpp"
#include "waveleton/wigner.hpp"

#ifdef WAVELETON_HAVE_OPENMP
#include <omp.h>
#endif

namespace waveleton {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Small utilities
// ---------------------------------------------------------------------------

// Wall-clock phase timer feeding the manifest's informational timing list.
struct PhaseClock {
    std::vector<PhaseTiming> timings;
    std::string current;
    std::chrono::steady_clock::time_point started{};

    void begin(const std::string& phase) {
        close();
        current = phase;
        started = std::chrono::steady_clock::now();
    }
    void close() {
        if (current.empty()) return;
        const auto now = std::chrono::steady_clock::now();
        timings.push_back({current, std::chrono::duration<double>(now - started).count()});
        current.clear();
    }
};

// Parallelism is off unless WAVELETON_THREADS raises the cap; the bit-exact
// rerun guarantee is stated for the single-threaded baseline.
void apply_thread_cap() {
    int n = 1;
    if (const char* env = std::getenv("WAVELETON_THREADS")) {
        char extra = 0;
        if (std::sscanf(env, "%d %c", &n, &extra) != 1 || n < 1)
            throw BadValue("WAVELETON_THREADS must be a positive integer, got '" +
                           std::string(env) + "'");
    }
#ifdef WAVELETON_HAVE_OPENMP
    omp_set_num_threads(n);
#else
    (void)n;
#endif
}

bool has(const json& p, const char* key) { return p.contains(key); }

double num_or(const json& p, const char* key, double def) {
    if (!p.contains(key)) return def;
    const json& v = p.at(key);
    if (!v.is_number()) throw BadValue(std::string(key) + " must be a number");
    return v.get<double>();
}

int int_or(const json& p, const char* key, int def) {
    if (!p.contains(key)) return def;
    const json& v = p.at(key);
    if (!v.is_number()) throw BadValue(std::string(key) + " must be an integer");
    const double d = v.get<double>();
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw BadValue(std::string(key) + " must be an integer");
    return i;
}

std::string str_or(const json& p, const char* key, const std::string& def) {
    if (!p.contains(key)) return def;
    const json& v = p.at(key);
    if (!v.is_string()) throw BadValue(std::string(key) + " must be a string");
    return v.get<std::string>();
}

bool bool_or(const json& p, const char* key, bool def) {
    if (!p.contains(key)) return def;
    const json& v = p.at(key);
    if (!v.is_boolean()) throw BadValue(std::string(key) + " must be a boolean");
    return v.get<bool>();
}

// Strict key check for nested config objects (the top level is checked by
// merge_config; sub-objects get the same treatment here).
void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& context) {
    if (!obj.is_object()) throw BadValue(context + " must be a JSON object");
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end())
            throw UnknownKey("unknown key '" + item.key() + "' in " + context);
    }
}

// splitmix64, the tool-wide deterministic generator.
std::uint64_t next_u64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) {
    return static_cast<double>(next_u64(state) >> 11) * 0x1.0p-53;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return dir + "/" + name;
}

// JSON numeric array with 17 significant digits per entry, composed by hand
// so the digit count is explicit rather than the library's shortest form.
std::string num_array_g17(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_g17(v[i]);
    }
    s += "]";
    return s;
}

std::string filter_short_name(const WaveletFilter& f) {
    switch (f.family) {
        case WaveletFamily::haar: return "haar";
        case WaveletFamily::daubechies: return "db" + std::to_string(f.order);
        case WaveletFamily::symmlet: return "sym" + std::to_string(f.order);
    }
    return "?";
}

json metrics_json(const PatternMetrics& m) {
    return json{{"concentration_50", m.concentration_50},
                {"participation_ratio", m.participation_ratio},
                {"coeff_entropy", m.coeff_entropy},
                {"max_cell_share", m.max_cell_share},
                {"rank1_distance", m.rank1_distance}};
}

json grid_meta_json(const Grid2D& g) {
    return json{{"nq", g.nq},     {"np", g.np},     {"q_min", g.q_min}, {"q_max", g.q_max},
                {"p_min", g.p_min}, {"p_max", g.p_max}};
}

// ---------------------------------------------------------------------------
// Signal generators shared by dwt and mra-demo
// ---------------------------------------------------------------------------

struct GeneratedSignal {
    Signal s;
    std::string kind;
    json params;  // fully resolved generator parameters, echoed in sidecars
};

GeneratedSignal make_signal(const json& p, int n) {
    if (has(p, "input")) {
        const std::string path = str_or(p, "input", "");
        const auto rows = read_csv_numbers(path);
        Signal s;
        for (const auto& row : rows)
            for (double v : row) s.push_back(v);
        if (static_cast<int>(s.size()) != n)
            throw BadLength("input file holds " + std::to_string(s.size()) +
                            " samples but n = " + std::to_string(n));
        return {std::move(s), "file", json{{"path", path}}};
    }

    const std::string kind = str_or(p, "signal", "kick");
    const json prm = p.contains("params") ? p.at("params") : json::object();

    if (kind == "kick") {
        check_keys(prm, {"center", "amplitude", "width_cells"}, "params");
        const double center = num_or(prm, "center", 0.35);
        const double amplitude = num_or(prm, "amplitude", 1.0);
        const double width = num_or(prm, "width_cells", 4.0);
        return {kick_signal(n, center, amplitude, width), kind,
                json{{"center", center}, {"amplitude", amplitude}, {"width_cells", width}}};
    }
    if (kind == "multikick") {
        check_keys(prm, {"centers", "amplitudes", "width_cells"}, "params");
        std::vector<double> centers{0.2, 0.55, 0.8};
        std::vector<double> amplitudes{1.0, -0.7, 0.4};
        if (has(prm, "centers")) centers = prm.at("centers").get<std::vector<double>>();
        if (has(prm, "amplitudes")) amplitudes = prm.at("amplitudes").get<std::vector<double>>();
        const double width = num_or(prm, "width_cells", 3.0);
        if (centers.size() != amplitudes.size())
            throw BadParams("multikick: centers and amplitudes must pair up");
        std::vector<Kick> kicks;
        for (std::size_t i = 0; i < centers.size(); ++i)
            kicks.push_back({centers[i], amplitudes[i]});
        return {multikick_signal(n, kicks, width), kind,
                json{{"centers", centers}, {"amplitudes", amplitudes}, {"width_cells", width}}};
    }
    if (kind == "fractal") {
        check_keys(prm, {"a", "b", "terms"}, "params");
        const double a = num_or(prm, "a", 0.6);
        const int b = int_or(prm, "b", 3);
        const int terms = int_or(prm, "terms", 24);
        return {rw_fractal_signal(n, a, b, terms), kind,
                json{{"a", a}, {"b", b}, {"terms", terms}}};
    }
    if (kind == "sine") {
        check_keys(prm, {"cycles", "phase"}, "params");
        const int cycles = int_or(prm, "cycles", 4);
        const double phase = num_or(prm, "phase", 0.0);
        Signal s(n);
        for (int i = 0; i < n; ++i)
            s[i] = std::sin(2.0 * M_PI * cycles * i / n + phase);
        return {std::move(s), kind, json{{"cycles", cycles}, {"phase", phase}}};
    }
    if (kind == "random") {
        check_keys(prm, {"seed"}, "params");
        const int seed = int_or(prm, "seed", 1);
        if (seed < 0) throw BadValue("params.seed must be nonnegative");
        std::uint64_t state =
            seed ? static_cast<std::uint64_t>(seed) : 0x9e3779b97f4a7c15ull;
        Signal s(n);
        for (int i = 0; i < n; ++i) s[i] = 2.0 * uniform01(state) - 1.0;
        return {std::move(s), kind, json{{"seed", seed}}};
    }
    throw BadValue("unknown signal kind '" + kind +
                   "' (expected kick, multikick, fractal, sine, random)");
}

// ---------------------------------------------------------------------------
// Subcommand executors. Each returns the produced file names (relative to
// the run directory) for the manifest.
// ---------------------------------------------------------------------------

std::vector<std::string> exec_filters(const json& p, const std::string& out, PhaseClock& clock) {
    clock.begin("construct");
    const std::string family_str = str_or(p, "family", "daubechies");
    WaveletFamily family;
    if (family_str == "haar")
        family = WaveletFamily::haar;
    else if (family_str == "daubechies" || family_str == "db")
        family = WaveletFamily::daubechies;
    else if (family_str == "symmlet" || family_str == "sym")
        family = WaveletFamily::symmlet;
    else
        throw BadValue("unknown family '" + family_str +
                       "' (expected haar, daubechies, symmlet)");
    const int order = int_or(p, "order", family == WaveletFamily::haar ? 1 : 2);
    const WaveletFilter f = make_filter(family, order);

    clock.begin("write");
    std::string text = "{\n";
    text += "  \"family\": \"" + family_name(f.family) + "\",\n";
    text += "  \"order\": " + std::to_string(f.order) + ",\n";
    text += "  \"h\": " + num_array_g17(f.h) + ",\n";
    text += "  \"g\": " + num_array_g17(f.g) + "\n";
    text += "}\n";
    atomic_write_bytes(join_path(out, "filters.json"), text);
    std::cout << text;
    return {"filters.json"};
}

std::vector<std::string> exec_dwt(const json& p, const std::string& out, PhaseClock& clock) {
    clock.begin("setup");
    const int n = int_or(p, "n", 256);
    log2_exact(n);
    const WaveletFilter f = make_filter(str_or(p, "filter", "db4"));
    const GeneratedSignal gen = make_signal(p, n);
    const int levels = int_or(p, "levels", max_levels(n));

    clock.begin("transform");
    const MraDecomposition d = dwt_periodic(gen.s, f, levels);
    const Signal back = idwt_periodic(d, f);
    double roundtrip = 0.0;
    for (int i = 0; i < n; ++i) roundtrip = std::max(roundtrip, std::abs(back[i] - gen.s[i]));

    clock.begin("write");
    std::vector<std::vector<std::string>> rows;
    int slot = 0;
    double coarse_energy = 0.0;
    for (std::size_t i = 0; i < d.coarse.size(); ++i) {
        rows.push_back({std::to_string(slot++), "coarse", std::to_string(i),
                        format_g17(d.coarse[i])});
        coarse_energy += d.coarse[i] * d.coarse[i];
    }
    std::vector<double> detail_energy;
    for (std::size_t t = 0; t < d.details.size(); ++t) {
        double e = 0.0;
        for (std::size_t i = 0; i < d.details[t].size(); ++i) {
            rows.push_back({std::to_string(slot++), "detail_" + std::to_string(t),
                            std::to_string(i), format_g17(d.details[t][i])});
            e += d.details[t][i] * d.details[t][i];
        }
        detail_energy.push_back(e);
    }
    write_csv(join_path(out, "coefficients.csv"), {"slot", "band", "index", "value"}, rows);

    const json sidecar = {{"signal_kind", gen.kind},
                          {"params", gen.params},
                          {"n", n},
                          {"filter", filter_short_name(f)},
                          {"levels", levels},
                          {"band_energy", json{{"coarse", coarse_energy}, {"details", detail_energy}}},
                          {"roundtrip_max_error", roundtrip}};
    atomic_write_bytes(join_path(out, "dwt.json"), sidecar.dump(2) + "\n");
    std::cout << "dwt: n=" << n << " levels=" << levels
              << " roundtrip_max_error=" << roundtrip << "\n";
    return {"coefficients.csv", "dwt.json"};
}

std::vector<std::string> exec_mra_demo(const json& p, const std::string& out, PhaseClock& clock) {
    clock.begin("setup");
    const int n = int_or(p, "n", 512);
    log2_exact(n);
    const WaveletFilter f = make_filter(str_or(p, "filter", "db4"));
    const GeneratedSignal gen = make_signal(p, n);
    const int levels = int_or(p, "levels", std::min(4, max_levels(n)));

    clock.begin("transform");
    const MraDecomposition d = dwt_periodic(gen.s, f, levels);
    // One reconstruction column per level of the decomposition: the coarse
    // approximation plus each absolute detail level, coarsest first. Their
    // sum equals the input signal.
    const int coarse_level = log2_exact(n) - levels;
    std::vector<std::string> names;
    std::vector<Signal> columns;
    names.push_back("coarse_" + std::to_string(coarse_level));
    columns.push_back(reconstruct_coarse(d, f));
    for (int lev = coarse_level; lev < log2_exact(n); ++lev) {
        names.push_back("detail_" + std::to_string(lev));
        columns.push_back(reconstruct_detail(d, f, lev));
    }

    clock.begin("write");
    std::vector<std::vector<std::string>> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (const Signal& c : columns) rows[static_cast<std::size_t>(i)].push_back(format_g17(c[i]));
    write_csv(join_path(out, "reconstructions.csv"), names, rows);

    std::vector<double> energy;
    for (const Signal& c : columns) {
        double e = 0.0;
        for (double v : c) e += v * v;
        energy.push_back(e);
    }
    const json sidecar = {{"signal_kind", gen.kind}, {"params", gen.params},
                          {"n", n},                  {"filter", filter_short_name(f)},
                          {"levels", levels},        {"columns", names},
                          {"per_level_energy", energy}};
    atomic_write_bytes(join_path(out, "mra_demo.json"), sidecar.dump(2) + "\n");
    std::cout << "mra-demo: n=" << n << " levels=" << levels << " columns=" << names.size()
              << "\n";
    return {"reconstructions.csv", "mra_demo.json"};
}

std::vector<std::string> exec_conn_coeffs(const json& p, const std::string& out,
                                          PhaseClock& clock) {
    clock.begin("construct");
    const std::string name = str_or(p, "filter", "db3");
    const WaveletFilter f = make_filter(name);
    const int order = int_or(p, "derivative_order", 1);
    const ConnectionCoefficients cc = connection_coefficients(f, order);

    // r_{-l} = (-1)^order r_l is a structural identity of these overlaps;
    // report how well the computed table honors it.
    double symmetry = 0.0;
    const double sign = (order % 2 == 0) ? 1.0 : -1.0;
    for (int ell = -cc.half_support; ell <= cc.half_support; ++ell)
        symmetry = std::max(symmetry, std::abs(cc.at(-ell) - sign * cc.at(ell)));

    clock.begin("write");
    std::string text = "{\n";
    text += "  \"filter\": \"" + filter_short_name(f) + "\",\n";
    text += "  \"derivative_order\": " + std::to_string(cc.derivative_order) + ",\n";
    text += "  \"half_support\": " + std::to_string(cc.half_support) + ",\n";
    text += "  \"ell_min\": " + std::to_string(-cc.half_support) + ",\n";
    text += "  \"ell_max\": " + std::to_string(cc.half_support) + ",\n";
    text += "  \"r\": " + num_array_g17(cc.r) + ",\n";
    text += "  \"symmetry_residual\": " + format_g17(symmetry) + "\n";
    text += "}\n";
    atomic_write_bytes(join_path(out, "conn_coeffs.json"), text);
    std::cout << text;
    return {"conn_coeffs.json"};
}

std::vector<std::string> exec_nsform(const json& p, const std::string& out, PhaseClock& clock) {
    clock.begin("setup");
    const std::string op = str_or(p, "op", "ddx");
    const WaveletFilter f = make_filter(str_or(p, "filter", "db6"));
    const int levels = int_or(p, "levels", 4);
    const double threshold = num_or(p, "threshold", 0.0);
    if (threshold < 0) throw BadValue("threshold must be nonnegative");
    const bool dump_blocks = bool_or(p, "dump_blocks", false);

    Eigen::MatrixXd dense;
    int n = 0;
    if (op == "ddx" || op == "d2dx2") {
        n = int_or(p, "n", 256);
        log2_exact(n);
        const ConnectionCoefficients cc = connection_coefficients(f, op == "ddx" ? 1 : 2);
        dense = derivative_matrix(n, cc, 1.0 / n);
    } else if (op == "kernel-file") {
        const std::string path = str_or(p, "kernel_file", "");
        if (path.empty()) throw BadValue("op kernel-file requires kernel_file");
        const auto rows = read_csv_numbers(path);
        n = static_cast<int>(rows.size());
        log2_exact(n);
        dense.resize(n, n);
        for (int i = 0; i < n; ++i) {
            if (static_cast<int>(rows[static_cast<std::size_t>(i)].size()) != n)
                throw BadShape("kernel file must be a square numeric matrix");
            for (int j = 0; j < n; ++j)
                dense(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        }
        if (has(p, "n") && int_or(p, "n", n) != n)
            throw BadValue("n contradicts the kernel file size");
    } else {
        throw BadValue("unknown op '" + op + "' (expected ddx, d2dx2, kernel-file)");
    }

    clock.begin("build");
    NonStandardForm nsf = build_nonstandard_form(dense, f, levels);
    const std::size_t nnz_unthresholded = nsf.nonzeros();
    ThresholdStats stats{nnz_unthresholded, nnz_unthresholded, 0.0};
    if (threshold > 0.0) {
        ThresholdResult res = threshold_nonstandard(nsf, threshold);
        nsf = std::move(res.nsf);
        stats = res.stats;
    }

    // Deterministic probe vector: compare the multiscale apply against the
    // dense product to show the compressed form still acts like the operator.
    std::uint64_t state = 0x77ull;
    Signal v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = 2.0 * uniform01(state) - 1.0;
    const Signal got = apply_nonstandard(nsf, v);
    Eigen::Map<const Eigen::VectorXd> vm(v.data(), n);
    const Eigen::VectorXd want = dense * vm;
    double err2 = 0.0, ref2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d0 = got[static_cast<std::size_t>(i)] - want(i);
        err2 += d0 * d0;
        ref2 += want(i) * want(i);
    }
    const double apply_rel_error = ref2 > 0 ? std::sqrt(err2 / ref2) : std::sqrt(err2);

    clock.begin("write");
    std::vector<std::string> files;
    if (dump_blocks) {
        std::vector<std::vector<std::string>> rows;
        auto emit = [&rows](int level, const char* block, const Eigen::SparseMatrix<double>& m) {
            for (int k = 0; k < m.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
                    rows.push_back({std::to_string(level), block, std::to_string(it.row()),
                                    std::to_string(it.col()), format_g17(it.value())});
        };
        for (int j = 1; j <= nsf.levels; ++j) {
            const OperatorBlocks& b = nsf.blocks[static_cast<std::size_t>(j - 1)];
            emit(j, "A", b.A);
            emit(j, "B", b.B);
            emit(j, "G", b.G);
        }
        emit(nsf.levels, "coarse", nsf.coarse);
        write_csv(join_path(out, "blocks.csv"), {"level", "block", "row", "col", "value"}, rows);
        files.push_back("blocks.csv");
    }

    const json report = {{"op", op},
                         {"filter", filter_short_name(f)},
                         {"n", n},
                         {"levels", levels},
                         {"threshold", threshold},
                         {"dense_entries", static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n)},
                         {"nonzeros_before", stats.nonzeros_before},
                         {"nonzeros_after", stats.nonzeros_after},
                         {"max_apply_error_bound", stats.max_apply_error_bound},
                         {"sample_apply_relative_error", apply_rel_error}};
    atomic_write_bytes(join_path(out, "nsform.json"), report.dump(2) + "\n");
    files.push_back("nsform.json");
    std::cout << "nsform: n=" << n << " levels=" << levels << " nnz=" << stats.nonzeros_after
              << "/" << (static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n))
              << " apply_rel_error=" << apply_rel_error << "\n";
    return files;
}

std::vector<std::string> exec_wigner_transform(const json& p, const std::string& out,
                                               PhaseClock& clock) {
    clock.begin("setup");
    const std::string kind = str_or(p, "state", "gaussian");
    const int n = int_or(p, "n", 256);
    log2_exact(n);
    const double box = num_or(p, "box", 8.0);
    if (box <= 0) throw BadValue("box must be positive");
    const double hbar = num_or(p, "hbar", 1.0);
    const double mass = num_or(p, "mass", 1.0);
    if (hbar <= 0 || mass <= 0) throw BadValue("hbar and mass must be positive");
    const double q_min = -box, q_max = box;
    const double dq = (q_max - q_min) / n;

    std::vector<std::complex<double>> psi(static_cast<std::size_t>(n));
    json state_params;
    if (kind == "gaussian") {
        const double q0 = num_or(p, "q0", 0.0);
        const double p0 = num_or(p, "p0", 0.0);
        const double sigma = num_or(p, "sigma", std::sqrt(hbar / 2.0));
        if (sigma <= 0) throw BadValue("sigma must be positive");
        for (int i = 0; i < n; ++i) {
            const double x = q_min + i * dq;
            const double arg = (x - q0) / (2.0 * sigma);
            psi[static_cast<std::size_t>(i)] =
                std::exp(std::complex<double>(-arg * arg, p0 * (x - q0) / hbar));
        }
        state_params = {{"q0", q0}, {"p0", p0}, {"sigma", sigma}};
    } else if (kind == "eigen") {
        // Superposition of harmonic-oscillator eigenstates (m = omega = 1)
        // built with the stable normalized recurrence
        //   u_k(y) = sqrt(2/k) y u_{k-1}(y) - sqrt((k-1)/k) u_{k-2}(y).
        std::vector<double> coeffs{1.0};
        if (has(p, "coeffs")) coeffs = p.at("coeffs").get<std::vector<double>>();
        if (coeffs.empty() || coeffs.size() > 25)
            throw BadValue("coeffs must hold 1..25 numbers");
        double norm2 = 0.0;
        for (double c : coeffs) {
            if (!std::isfinite(c)) throw BadValue("coeffs must be finite");
            norm2 += c * c;
        }
        if (norm2 <= 0) throw BadValue("coeffs must not all vanish");
        for (int i = 0; i < n; ++i) {
            const double x = q_min + i * dq;
            const double y = x / std::sqrt(hbar);
            double um1 = 0.0;
            double u = std::pow(M_PI, -0.25) * std::exp(-0.5 * y * y);
            double acc = coeffs[0] * u;
            for (std::size_t k = 1; k < coeffs.size(); ++k) {
                const double kk = static_cast<double>(k);
                const double next =
                    std::sqrt(2.0 / kk) * y * u - std::sqrt((kk - 1.0) / kk) * um1;
                um1 = u;
                u = next;
                acc += coeffs[k] * u;
            }
            psi[static_cast<std::size_t>(i)] = acc;
        }
        state_params = {{"coeffs", coeffs}};
    } else {
        throw BadValue("unknown state '" + kind + "' (expected gaussian, eigen)");
    }

    double norm = 0.0;
    for (const auto& c : psi) norm += std::norm(c);
    norm *= dq;
    if (norm <= 0) throw ZeroField("wavefunction vanishes on the grid");
    const double scale = 1.0 / std::sqrt(norm);
    for (auto& c : psi) c *= scale;

    clock.begin("transform");
    const WignerState state = wigner_transform(psi, hbar, q_min, q_max, mass);
    const QuantumnessMetrics qm = quantumness_metrics(state);

    clock.begin("write");
    write_grid_file(join_path(out, "wigner.wgrd"), state.grid);
    const json report = {{"state", kind},
                         {"state_params", state_params},
                         {"hbar", hbar},
                         {"mass", mass},
                         {"grid", grid_meta_json(state.grid)},
                         {"mass_integral", state_mass(state)},
                         {"purity", qm.purity},
                         {"negativity_volume", qm.negativity_volume},
                         {"min_value", qm.min_value}};
    atomic_write_bytes(join_path(out, "wigner.json"), report.dump(2) + "\n");
    std::cout << "wigner-transform: " << kind << " n=" << n << " purity=" << qm.purity
              << " negativity=" << qm.negativity_volume << "\n";
    return {"wigner.wgrd", "wigner.json"};
}

std::vector<std::string> exec_evolve(const json& p, const std::string& out, PhaseClock& clock) {
    clock.begin("setup");
    const double hbar = num_or(p, "hbar", 1.0);
    const double mass = num_or(p, "mass", 1.0);
    if (hbar <= 0 || mass <= 0) throw BadValue("hbar and mass must be positive");

    PolynomialPotential U;
    if (has(p, "potential")) {
        const json& pj = p.at("potential");
        if (pj.is_array())
            U.coeffs = pj.get<std::vector<double>>();
        else if (pj.is_object()) {
            check_keys(pj, {"coeffs"}, "potential");
            U.coeffs = pj.at("coeffs").get<std::vector<double>>();
        } else
            throw BadValue("potential must be an array of coefficients or {\"coeffs\": [...]}");
    }
    for (double c : U.coeffs)
        if (!std::isfinite(c)) throw BadValue("potential coefficients must be finite");

    json gj = p.contains("grid") ? p.at("grid") : json::object();
    check_keys(gj, {"n", "nq", "np", "q_min", "q_max", "p_min", "p_max"}, "grid");
    const int n_default = int_or(gj, "n", 128);
    const int nq = int_or(gj, "nq", n_default);
    const int np = int_or(gj, "np", n_default);
    const Grid2D domain =
        make_grid(nq, np, num_or(gj, "q_min", -8.0), num_or(gj, "q_max", 8.0),
                  num_or(gj, "p_min", -8.0), num_or(gj, "p_max", 8.0));

    json mixture = json::array();
    if (has(p, "mixture")) {
        mixture = p.at("mixture");
        if (!mixture.is_array() || mixture.empty())
            throw BadValue("mixture must be a nonempty array of components");
    } else {
        mixture.push_back(json{{"weight", 1.0}});
    }
    double wsum = 0.0;
    for (const json& comp : mixture) {
        check_keys(comp, {"weight", "q0", "p0", "sigma_q", "sigma_p"}, "mixture component");
        const double w = num_or(comp, "weight", 1.0);
        if (!(w > 0)) throw BadValue("mixture weights must be positive");
        wsum += w;
    }
    WignerState state;
    bool first = true;
    for (const json& comp : mixture) {
        const double w = num_or(comp, "weight", 1.0) / wsum;
        const WignerState part = gaussian_state(
            domain, num_or(comp, "q0", 0.0), num_or(comp, "p0", 0.0),
            num_or(comp, "sigma_q", std::sqrt(hbar / 2.0)),
            num_or(comp, "sigma_p", std::sqrt(hbar / 2.0)), hbar, mass);
        if (first) {
            state = part;
            for (double& v : state.grid.values) v *= w;
            first = false;
        } else {
            for (std::size_t i = 0; i < state.grid.values.size(); ++i)
                state.grid.values[i] += w * part.grid.values[i];
        }
    }

    EvolveOptions opt;
    const std::string integ = str_or(p, "integrator", "rk4");
    if (integ == "rk4")
        opt.method = Integrator::rk4;
    else if (integ == "crank_nicolson" || integ == "cn")
        opt.method = Integrator::crank_nicolson;
    else
        throw BadValue("unknown integrator '" + integ + "' (expected rk4, crank_nicolson)");
    const double cfl = cfl_limit(state, U);
    opt.dt = num_or(p, "dt", 0.5 * cfl);
    if (!(opt.dt > 0)) throw BadValue("dt must be positive");
    opt.steps = int_or(p, "steps", 100);
    if (opt.steps < 0) throw BadValue("steps must be nonnegative");
    opt.snapshot_every = int_or(p, "snapshot_every", 0);
    if (opt.snapshot_every < 0) throw BadValue("snapshot_every must be nonnegative");
    if (has(p, "lindblad")) {
        const json& lj = p.at("lindblad");
        check_keys(lj, {"gamma", "D", "diffusion"}, "lindblad");
        LindbladParams lp;
        lp.gamma = num_or(lj, "gamma", 0.0);
        lp.diffusion = num_or(lj, "D", num_or(lj, "diffusion", 0.0));
        if (lp.gamma < 0 || lp.diffusion < 0)
            throw BadValue("lindblad gamma and D must be nonnegative");
        opt.lindblad = lp;
    }
    const std::string backend = str_or(p, "backend", "connection");
    if (backend == "connection")
        opt.deriv.backend = DerivBackend::connection;
    else if (backend == "spectral")
        opt.deriv.backend = DerivBackend::spectral;
    else
        throw BadValue("unknown backend '" + backend + "' (expected connection, spectral)");
    opt.deriv.filter = str_or(p, "stencil_filter", opt.deriv.filter);

    clock.begin("evolve");
    const Trajectory traj = evolve(state, U, opt);

    clock.begin("write");
    std::vector<std::string> files;
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        char name[40];
        std::snprintf(name, sizeof name, "snapshot_%06d.wgrd", traj.snapshot_steps[k]);
        write_grid_file(join_path(out, name), traj.snapshots[k].grid);
        files.push_back(name);
    }
    std::vector<std::vector<std::string>> rows;
    for (const StepDiagnostics& d : traj.diagnostics) {
        const double purity = 2.0 * M_PI * hbar * d.l2_norm * d.l2_norm;
        rows.push_back({std::to_string(d.step), format_g17(d.time), format_g17(d.mass),
                        format_g17(purity), format_g17(d.negativity)});
    }
    write_csv(join_path(out, "diagnostics.csv"), {"step", "time", "mass", "purity", "negativity"},
              rows);
    files.push_back("diagnostics.csv");

    const StepDiagnostics& last = traj.diagnostics.back();
    const json report = {
        {"integrator", integ},
        {"dt", opt.dt},
        {"steps", opt.steps},
        {"snapshot_every", opt.snapshot_every},
        {"hbar", hbar},
        {"mass", mass},
        {"potential", U.coeffs},
        {"grid", grid_meta_json(domain)},
        {"cfl_limit", cfl},
        {"lindblad", opt.lindblad ? json{{"gamma", opt.lindblad->gamma},
                                         {"D", opt.lindblad->diffusion}}
                                  : json(nullptr)},
        {"snapshot_steps", traj.snapshot_steps},
        {"final", json{{"time", last.time},
                       {"mass", last.mass},
                       {"purity", 2.0 * M_PI * hbar * last.l2_norm * last.l2_norm},
                       {"negativity", last.negativity}}}};
    atomic_write_bytes(join_path(out, "evolve.json"), report.dump(2) + "\n");
    files.push_back("evolve.json");
    std::cout << "evolve: steps=" << opt.steps << " dt=" << opt.dt
              << " snapshots=" << traj.snapshots.size() << " final_mass=" << last.mass << "\n";
    return files;
}

MatrixSpec parse_matrix_spec(const std::string& s) {
    auto parse_triplet = [&s](MatrixSpec& spec, const std::string& body) {
        // width[,band_value[,off_value]]
        std::vector<std::string> parts;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = body.find(',', pos);
            parts.push_back(body.substr(pos, comma - pos));
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        if (parts.empty() || parts.size() > 3)
            throw BadSpec("matrix spec '" + s + "' needs width[,band_value[,off_value]]");
        try {
            std::size_t used = 0;
            spec.width = std::stoi(parts[0], &used);
            if (used != parts[0].size()) throw std::invalid_argument(parts[0]);
            if (parts.size() > 1) {
                spec.band_value = std::stod(parts[1], &used);
                if (used != parts[1].size()) throw std::invalid_argument(parts[1]);
            }
            if (parts.size() > 2) {
                spec.off_value = std::stod(parts[2], &used);
                if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
            }
        } catch (const std::logic_error&) {
            throw BadSpec("matrix spec '" + s + "' has non-numeric fields");
        }
    };

    MatrixSpec spec;
    if (s == "ones") {
        spec.kind = MatrixKind::ones;
        return spec;
    }
    if (s.rfind("band:", 0) == 0) {
        spec.kind = MatrixKind::band_diagonal;
        parse_triplet(spec, s.substr(5));
        return spec;
    }
    if (s.rfind("tri:", 0) == 0) {
        spec.kind = MatrixKind::band_triangular;
        parse_triplet(spec, s.substr(4));
        return spec;
    }
    if (s.rfind("random:", 0) == 0) {
        spec.kind = MatrixKind::random_uniform;
        const std::string body = s.substr(7);
        try {
            std::size_t used = 0;
            spec.seed = std::stoull(body, &used);
            if (used != body.size()) throw std::invalid_argument(body);
        } catch (const std::logic_error&) {
            throw BadSpec("matrix spec '" + s + "' needs an unsigned integer seed");
        }
        return spec;
    }
    if (s.size() > 4 && s.substr(s.size() - 4) == ".csv") {
        const auto rows = read_csv_numbers(s);
        const int n = static_cast<int>(rows.size());
        spec.kind = MatrixKind::explicit_values;
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != n)
                throw BadShape("matrix file must be square, got a row of length " +
                               std::to_string(row.size()) + " in an " + std::to_string(n) +
                               "-row file");
            spec.values.insert(spec.values.end(), row.begin(), row.end());
        }
        return spec;
    }
    throw BadSpec("unknown matrix spec '" + s +
                  "' (expected ones, band:w[,bv[,ov]], tri:w[,bv[,ov]], random:seed, "
                  "or a .csv path)");
}

std::vector<std::string> exec_synth(const json& p, const std::string& out, PhaseClock& clock) {
    clock.begin("setup");
    const std::string matrix_str = str_or(p, "matrix", "ones");
    const MatrixSpec mspec = parse_matrix_spec(matrix_str);
    const int level = int_or(p, "level", 4);
    if (level < 0 || level > 20) throw BadSpec("level must lie in [0, 20]");
    const int size = int_or(p, "size", 256);
    log2_exact(size);
    const int n_modes = 1 << level;
    if (mspec.kind == MatrixKind::explicit_values &&
        static_cast<int>(mspec.values.size()) != n_modes * n_modes)
        throw BadShape("matrix file holds " + std::to_string(mspec.values.size()) +
                       " entries but level " + std::to_string(level) + " needs " +
                       std::to_string(n_modes) + "x" + std::to_string(n_modes));
    const CoefficientMatrix a = generate_matrix(mspec, n_modes);

    SynthesisSpec syn;
    syn.filter = str_or(p, "filter", "sym6");
    syn.max_level = level;
    syn.nq = size;
    syn.np = size;
    syn.q_min = num_or(p, "q_min", 0.0);
    syn.q_max = num_or(p, "q_max", 1.0);
    syn.p_min = num_or(p, "p_min", 0.0);
    syn.p_max = num_or(p, "p_max", 1.0);
    syn.hbar = num_or(p, "hbar", 1.0);
    syn.mass = num_or(p, "mass", 1.0);

    clock.begin("synthesize");
    const Grid2D g = synthesize(a, syn);
    const PatternMetrics mode_metrics = compute_metrics(a);
    const PatternMetrics grid_metrics = compute_metrics(g);
    const PatternClass cls = classify(mode_metrics);

    clock.begin("write");
    write_grid_file(join_path(out, "synth.wgrd"), g);
    write_pgm_file(join_path(out, "synth.pgm"), g);
    const json report = {{"matrix", matrix_str},
                         {"filter", syn.filter},
                         {"level", level},
                         {"size", size},
                         {"n_modes", n_modes},
                         {"grid", grid_meta_json(g)},
                         {"mode_metrics", metrics_json(mode_metrics)},
                         {"grid_metrics", metrics_json(grid_metrics)},
                         {"classification", pattern_class_name(cls)}};
    atomic_write_bytes(join_path(out, "metrics.json"), report.dump(2) + "\n");
    std::cout << "synth: matrix=" << matrix_str << " modes=" << n_modes << "x" << n_modes
              << " size=" << size << " class=" << pattern_class_name(cls) << "\n";
    return {"synth.wgrd", "synth.pgm", "metrics.json"};
}

std::vector<std::string> exec_metrics(const json& p, const std::string& out, PhaseClock& clock) {
    clock.begin("compute");
    json report = json::object();
    std::optional<PatternClass> cls;
    if (has(p, "matrix")) {
        const std::string path = str_or(p, "matrix", "");
        const auto rows = read_csv_numbers(path);
        CoefficientMatrix a;
        a.n = static_cast<int>(rows.size());
        for (const auto& row : rows) {
            if (static_cast<int>(row.size()) != a.n)
                throw BadShape("matrix file must be square");
            a.values.insert(a.values.end(), row.begin(), row.end());
        }
        const PatternMetrics m = compute_metrics(a);
        report["mode_metrics"] = metrics_json(m);
        cls = classify(m);
    }
    if (has(p, "input")) {
        const Grid2D g = read_grid_file(str_or(p, "input", ""));
        const PatternMetrics m = compute_metrics(g);
        report["grid_metrics"] = metrics_json(m);
        if (!cls) cls = classify(m);
    }
    if (!cls) throw BadValue("metrics needs --input (grid) and/or --matrix (mode matrix)");
    report["classification"] = pattern_class_name(*cls);

    clock.begin("write");
    atomic_write_bytes(join_path(out, "metrics.json"), report.dump(2) + "\n");
    std::cout << "metrics: classification=" << pattern_class_name(*cls) << "\n";
    return {"metrics.json"};
}

// ---------------------------------------------------------------------------
// Argument wiring
// ---------------------------------------------------------------------------

struct SubcommandSpec {
    std::string name;
    std::vector<std::string> allowed_keys;
    std::vector<std::string> (*exec)(const json&, const std::string&, PhaseClock&);
};

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"waveleton: wavelet multiresolution analysis, compressed operator forms,\n"
                 "phase-space evolution, and coefficient-pattern tools"};
    app.set_version_flag("--version", kVersion);

    const std::vector<SubcommandSpec> specs = {
        {"filters", {"family", "order"}, exec_filters},
        {"dwt", {"signal", "params", "n", "filter", "levels", "input"}, exec_dwt},
        {"mra-demo", {"signal", "params", "n", "filter", "levels", "input"}, exec_mra_demo},
        {"conn-coeffs", {"filter", "derivative_order"}, exec_conn_coeffs},
        {"nsform", {"op", "kernel_file", "filter", "levels", "threshold", "n", "dump_blocks"},
         exec_nsform},
        {"wigner-transform", {"state", "n", "box", "hbar", "mass", "q0", "p0", "sigma", "coeffs"},
         exec_wigner_transform},
        {"evolve",
         {"potential", "hbar", "mass", "grid", "integrator", "dt", "steps", "lindblad", "mixture",
          "snapshot_every", "backend", "stencil_filter"},
         exec_evolve},
        {"synth",
         {"matrix", "filter", "level", "size", "q_min", "q_max", "p_min", "p_max", "hbar", "mass"},
         exec_synth},
        {"metrics", {"input", "matrix"}, exec_metrics},
    };

    struct BoundFlag {
        std::string flag;  // exact spelling registered with the parser
        std::string key;   // config key it overrides
        char kind = 's';   // 's' string, 'n' number, 'i' integer
    };
    struct SubState {
        CLI::App* app = nullptr;
        const SubcommandSpec* spec = nullptr;
        std::string config_path;
        std::string out_dir = ".";
        // Flag storage. Only flags the user actually passed become overrides.
        std::map<std::string, std::string> strs;
        std::map<std::string, double> nums;
        std::map<std::string, int> ints;
        std::vector<BoundFlag> bound;
        bool dump_blocks = false;
    };
    std::vector<SubState> subs(specs.size());

    auto add_str = [](SubState& st, const std::string& flag, const std::string& key,
                      const std::string& help) {
        st.strs[key] = {};
        st.app->add_option(flag, st.strs[key], help);
        st.bound.push_back({flag, key, 's'});
    };
    auto add_num = [](SubState& st, const std::string& flag, const std::string& key,
                      const std::string& help) {
        st.nums[key] = 0.0;
        st.app->add_option(flag, st.nums[key], help);
        st.bound.push_back({flag, key, 'n'});
    };
    auto add_int = [](SubState& st, const std::string& flag, const std::string& key,
                      const std::string& help) {
        st.ints[key] = 0;
        st.app->add_option(flag, st.ints[key], help);
        st.bound.push_back({flag, key, 'i'});
    };

    for (std::size_t i = 0; i < specs.size(); ++i) {
        SubState& st = subs[i];
        st.spec = &specs[i];
        st.app = app.add_subcommand(specs[i].name, "");
        st.app->add_option("--config", st.config_path, "JSON config file (flags override it)");
        st.app->add_option("--out", st.out_dir, "run directory for artifacts + manifest.json");
    }

    auto* s_filters = &subs[0];
    s_filters->app->description("Export an orthonormal filter pair as JSON");
    add_str(*s_filters, "--family", "family", "haar | daubechies | symmlet");
    add_int(*s_filters, "--order", "order", "vanishing moments");

    auto* s_dwt = &subs[1];
    s_dwt->app->description("Periodic wavelet analysis of a built-in or file signal");
    add_str(*s_dwt, "--signal", "signal", "kick | multikick | fractal | sine | random");
    add_int(*s_dwt, "--n", "n", "signal length (power of two)");
    add_str(*s_dwt, "--filter", "filter", "filter name, e.g. db4 or sym6");
    add_int(*s_dwt, "--levels", "levels", "decomposition depth");
    add_str(*s_dwt, "--input", "input", "CSV file with one sample per cell");

    auto* s_mra = &subs[2];
    s_mra->app->description("Per-level reconstruction table of a multiresolution split");
    add_str(*s_mra, "--signal", "signal", "kick | multikick | fractal | sine | random");
    add_int(*s_mra, "--n", "n", "signal length (power of two)");
    add_str(*s_mra, "--filter", "filter", "filter name");
    add_int(*s_mra, "--levels", "levels", "decomposition depth");
    add_str(*s_mra, "--input", "input", "CSV file with one sample per cell");

    auto* s_cc = &subs[3];
    s_cc->app->description("Scaling-function derivative overlap table");
    add_str(*s_cc, "--filter", "filter", "filter name (needs enough regularity)");
    add_int(*s_cc, "--order", "derivative_order", "derivative order (1 or 2)");

    auto* s_nsf = &subs[4];
    s_nsf->app->description("Multiscale block form of a dense operator, with thresholding");
    add_str(*s_nsf, "--op", "op", "ddx | d2dx2 | kernel-file");
    add_str(*s_nsf, "--kernel-file", "kernel_file", "CSV dense matrix for op=kernel-file");
    add_str(*s_nsf, "--filter", "filter", "filter name");
    add_int(*s_nsf, "--levels", "levels", "scales to peel off");
    add_num(*s_nsf, "--threshold", "threshold", "drop block entries below this magnitude");
    add_int(*s_nsf, "--n", "n", "grid length for the derivative operators");
    s_nsf->app->add_flag("--dump-blocks", s_nsf->dump_blocks,
                         "also write every block entry as CSV");

    auto* s_wt = &subs[5];
    s_wt->app->description("Phase-space transform of a wavefunction");
    add_str(*s_wt, "--state", "state", "gaussian | eigen");
    add_int(*s_wt, "--n", "n", "grid points per axis (power of two)");
    add_num(*s_wt, "--box", "box", "position half-width; q in [-box, box)");
    add_num(*s_wt, "--hbar", "hbar", "Planck constant");
    add_num(*s_wt, "--q0", "q0", "packet center position");
    add_num(*s_wt, "--p0", "p0", "packet center momentum");
    add_num(*s_wt, "--sigma", "sigma", "packet position spread");

    auto* s_ev = &subs[6];
    s_ev->app->description("Integrate the phase-space transport equation");
    add_num(*s_ev, "--dt", "dt", "time step");
    add_int(*s_ev, "--steps", "steps", "number of steps");
    add_str(*s_ev, "--integrator", "integrator", "rk4 | crank_nicolson");
    add_int(*s_ev, "--snapshot-every", "snapshot_every",
            "grid dump cadence in steps (0: first + last only)");

    auto* s_sy = &subs[7];
    s_sy->app->description("Render a coefficient matrix in the 2-D wavelet basis");
    add_str(*s_sy, "--matrix", "matrix",
            "ones | band:w[,bv[,ov]] | tri:w[,bv[,ov]] | random:seed | file.csv");
    add_str(*s_sy, "--filter", "filter", "filter name");
    add_int(*s_sy, "--level", "level", "resolution level (2^level modes per axis)");
    add_int(*s_sy, "--size", "size", "output grid size per axis");

    auto* s_me = &subs[8];
    s_me->app->description("Concentration / participation metrics of a stored field or matrix");
    add_str(*s_me, "--input", "input", "grid file to measure cell-wise");
    add_str(*s_me, "--matrix", "matrix", "CSV mode matrix to measure entry-wise");

    // CLI11 wants argv-style input including the program name.
    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("waveleton");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        apply_thread_cap();
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::CallForHelp&) {
            std::cout << app.help();
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            std::cout << app.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::CallForVersion&) {
            std::cout << kVersion << "\n";
            return 0;
        }

        SubState* chosen = nullptr;
        for (SubState& st : subs)
            if (st.app->parsed()) chosen = &st;
        if (!chosen) {
            std::cerr << app.help();
            return 1;
        }

        // Flags the user passed become the override object; the config file
        // (when given) is the base. merge_config enforces the key allowlist
        // on both and lets the flags win.
        json overrides = json::object();
        for (const BoundFlag& b : chosen->bound) {
            if (!chosen->app->count(b.flag)) continue;
            if (b.kind == 's')
                overrides[b.key] = chosen->strs[b.key];
            else if (b.kind == 'n')
                overrides[b.key] = chosen->nums[b.key];
            else
                overrides[b.key] = chosen->ints[b.key];
        }
        if (chosen->spec->name == "nsform" && chosen->app->count("--dump-blocks"))
            overrides["dump_blocks"] = chosen->dump_blocks;

        const json base =
            chosen->config_path.empty() ? json::object() : load_json_object(chosen->config_path);
        const json params = merge_config(base, overrides, chosen->spec->allowed_keys);

        std::filesystem::create_directories(chosen->out_dir);
        PhaseClock clock;
        const std::vector<std::string> files =
            chosen->spec->exec(params, chosen->out_dir, clock);

        clock.begin("manifest");
        RunManifest manifest;
        manifest.config = json{{"subcommand", chosen->spec->name}, {"params", params}};
        manifest.tool_version = kVersion;
        clock.close();
        manifest.timings = clock.timings;
        write_manifest(chosen->out_dir, manifest, files);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 1;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: bad config value: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace waveleton
