#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"

#include "sls2/classifier.hpp"
#include "sls2/errors.hpp"
#include "sls2/io.hpp"
#include "sls2/trajectory.hpp"

namespace {

using namespace sls2;

constexpr int kExitStable = 0;
constexpr int kExitInputError = 1;
constexpr int kExitUnstable = 2;
constexpr int kExitInconclusive = 3;
constexpr int kExitNoWitness = 4;
constexpr int kExitBudget = 5;

int regime_exit_code(Regime r) {
    switch (r) {
    case Regime::ExponentiallyStable:
    case Regime::MarginallyStable:
        return kExitStable;
    case Regime::ExponentiallyUnstable:
    case Regime::MarginallyUnstable:
        return kExitUnstable;
    case Regime::Inconclusive:
        return kExitInconclusive;
    }
    return kExitInconclusive;
}

InputDocument read_input(const std::string& path) {
    if (path == "-") return load_input(std::cin, "<stdin>");
    return load_input_file(path);
}

void emit(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw ParseError(out_path, "cannot open output file");
    out << text;
}

// Flags shared by every subcommand; only flags the user actually passed
// override the values from the input document.
struct Overrides {
    int depth = 0;
    double band = 0.0;
    int qmax = 0;
    double tol = 0.0;
    double kappa_resolution = 0.0;
    bool assert_unit_jsr = false;
    bool fast = false;
    bool serial = false;
    std::vector<std::pair<int, int>> force_root;
    std::vector<int> force_irrational;

    void attach(CLI::App* cmd) {
        cmd->add_option("--depth", depth, "enumeration depth for word norms");
        cmd->add_option("--band", band, "bracket band around one");
        cmd->add_option("--qmax", qmax, "largest root-of-unity order to test");
        cmd->add_option("--tol", tol, "relative tolerance for structural decisions");
        cmd->add_option("--kappa-resolution", kappa_resolution,
                        "grid spacing for the overlap certificate");
        cmd->add_flag("--assert-unit-jsr", assert_unit_jsr,
                      "treat the joint growth rate as exactly one even if the bracket is loose");
        cmd->add_flag("--fast", fast, "prune enumeration words that cannot improve the bounds");
        cmd->add_flag("--serial", serial, "run enumeration and grid scans on one thread");
        cmd->add_option("--force-root", force_root,
                        "declare member INDEX a root of unity of order ORDER")
            ->type_name("INDEX ORDER");
        cmd->add_option("--force-irrational", force_irrational,
                        "declare member INDEX's eigenvalue ratio irrational")
            ->type_name("INDEX");
    }

    // `cmd` is the subcommand that actually parsed; only flags given there
    // override the input document.
    void apply(InputDocument& doc, const CLI::App* cmd) const {
        if (cmd->count("--depth")) doc.options.enum_opts.depth = depth;
        if (cmd->count("--band")) doc.options.band = band;
        if (cmd->count("--qmax")) doc.options.escape.q_max = qmax;
        if (cmd->count("--tol")) doc.set.tol.rel = tol;
        if (cmd->count("--kappa-resolution")) doc.options.kappa.resolution = kappa_resolution;
        if (assert_unit_jsr) doc.options.assert_unit_jsr = true;
        if (fast) doc.options.enum_opts.fast = true;
        if (serial) {
            doc.options.enum_opts.exec = Exec::Serial;
            doc.options.kappa.exec = Exec::Serial;
        }
        for (const auto& [idx, order] : force_root) {
            if (idx < 0 || idx >= doc.set.size())
                throw ParseError("--force-root", "member index out of range");
            doc.options.escape.forced_root[idx] = order;
        }
        for (int idx : force_irrational) {
            if (idx < 0 || idx >= doc.set.size())
                throw ParseError("--force-irrational", "member index out of range");
            doc.options.escape.forced_irrational.insert(idx);
        }
    }
};

int run_classify(const InputDocument& doc, const std::string& out_path) {
    const Verdict v = classify(doc.set, doc.options);
    emit(out_path, classify_report(doc, v).dump(2) + "\n");
    return regime_exit_code(v.regime);
}

int run_jsr(const InputDocument& doc, const std::string& out_path) {
    const JsrBounds b = jsr_bounds(doc.set, doc.options.enum_opts);
    nlohmann::json j;
    j["lower"] = b.lower;
    j["upper"] = b.upper;
    j["depth"] = b.depth;
    j["exact"] = b.exact;
    j["witness_word"] = b.witness_word;
    emit(out_path, j.dump(2) + "\n");
    return kExitStable;
}

int run_rates(const InputDocument& doc, const std::string& out_path) {
    const RateSequence rates = rate_sequence(doc.set, doc.options.enum_opts);

    // Prefer the exact structural rate; otherwise anchor at the enumerated
    // upper bound, which is a genuine bound at every depth.
    const StructureReport report = analyze(doc.set);
    double rho_hat;
    if (const auto rho = structural_growth_rate(doc.set, report)) {
        rho_hat = *rho;
    } else {
        const JsrBounds b = jsr_bounds(doc.set, doc.options.enum_opts);
        rho_hat = b.upper;
    }

    std::ostringstream os;
    write_rates_csv(os, rates, rho_hat);
    emit(out_path, os.str());
    return kExitStable;
}

int run_escape(const InputDocument& doc, const std::string& out_path, std::int64_t steps) {
    if (steps <= 0) steps = 1;
    const Verdict v = classify(doc.set, doc.options);
    if (v.regime != Regime::MarginallyUnstable || !v.witness) {
        std::cerr << "sls2 escape: set is not marginally unstable (verdict: "
                  << to_string(v.regime) << ")\n";
        return kExitNoWitness;
    }
    const Trajectory traj = simulate(doc.set, v.witness->sequence, v.witness->v0, steps);
    std::ostringstream os;
    write_escape_csv(os, traj);
    emit(out_path, os.str());
    std::cerr << "sls2 escape: " << v.witness->description << "\n";
    return kExitStable;
}

int run_bound(const InputDocument& doc, const std::string& out_path) {
    const Verdict v = classify(doc.set, doc.options);
    nlohmann::json j;
    j["regime"] = to_string(v.regime);
    if (v.regime == Regime::MarginallyStable) {
        if (v.kappa) {
            j["kind"] = "overlap";
            j["bound"] = v.kappa->bound;
            j["kappa_lower"] = v.kappa->kappa_lower;
        } else if (v.bdd) {
            j["kind"] = "triangular";
            j["bound"] = v.bdd->bound;
            j["basis"] = v.bdd_basis ? to_json(*v.bdd_basis) : nlohmann::json(nullptr);
            j["note"] = "bound holds in the reported basis; multiply by its conditioning "
                        "for the original coordinates";
        }
    } else {
        j["note"] = "uniform product bounds are only issued for marginally stable sets";
    }
    j["margins"] = v.margins;
    emit(out_path, j.dump(2) + "\n");
    return regime_exit_code(v.regime);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stability regimes, certificates, and escaping trajectories for switched "
                 "products of 2x2 complex matrices"};
    app.require_subcommand(1);

    std::string input_path;
    std::string out_path;
    std::int64_t steps = 10'000;

    Overrides over;

    CLI::App* classify_cmd = app.add_subcommand("classify", "classify the stability regime");
    CLI::App* jsr_cmd = app.add_subcommand("jsr", "two-sided joint growth-rate bounds");
    CLI::App* rates_cmd = app.add_subcommand("rates", "word-norm sequence as CSV");
    CLI::App* escape_cmd =
        app.add_subcommand("escape", "simulate a linearly escaping trajectory as CSV");
    CLI::App* bound_cmd = app.add_subcommand("bound", "certified uniform product-norm bound");

    for (CLI::App* cmd : {classify_cmd, jsr_cmd, rates_cmd, escape_cmd, bound_cmd}) {
        cmd->add_option("input", input_path, "input JSON file, or - for stdin")->required();
        cmd->add_option("--out", out_path, "write the result here instead of stdout");
    }
    over.attach(classify_cmd);
    over.attach(jsr_cmd);
    over.attach(rates_cmd);
    over.attach(escape_cmd);
    over.attach(bound_cmd);
    escape_cmd->add_option("--steps", steps, "trajectory length to simulate");

    CLI11_PARSE(app, argc, argv);

    const CLI::App* active = app.get_subcommands().front();

    try {
        InputDocument doc = read_input(input_path);
        over.apply(doc, active);
        if (classify_cmd->parsed()) return run_classify(doc, out_path);
        if (jsr_cmd->parsed()) return run_jsr(doc, out_path);
        if (rates_cmd->parsed()) return run_rates(doc, out_path);
        if (escape_cmd->parsed()) return run_escape(doc, out_path, steps);
        if (bound_cmd->parsed()) return run_bound(doc, out_path);
    } catch (const ParseError& e) {
        std::cerr << "sls2: input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const WorkBudgetExceeded& e) {
        std::cerr << "sls2: " << e.what() << "\n";
        return kExitBudget;
    } catch (const Error& e) {
        std::cerr << "sls2: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
