#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "qimp/assertion.hpp"
#include "qimp/densem.hpp"
#include "qimp/opsem.hpp"
#include "qimp/witness.hpp"
#include "qimp/wp.hpp"

namespace qimp::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse or validation failure, already prefixed with the file it came from.
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class F>
auto in_file(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        throw DataError(path + ":" + e.what());
    }
}

Program load_program(const std::string& path) {
    const auto text = read_text(path);
    return in_file(path, [&] { return parse_program(text); });
}

DistAssnPtr load_assertion(const std::string& path, const AssertionContext& ctx) {
    const auto text = read_text(path);
    return in_file(path, [&] {
        auto p = parse_assertion(text, ctx);
        check_kinds(*p);
        return p;
    });
}

LoadedPOVD load_povd(const std::string& path, const Program& prog) {
    const auto text = read_text(path);
    auto loaded = in_file(path, [&] { return povd_from_json(text); });
    if (loaded.qubits != prog.qubits) {
        std::string want;
        for (const auto& q : prog.qubits) want += (want.empty() ? "" : ", ") + q;
        throw DataError(path + ": qubits do not match the program's (" + want + ")");
    }
    return loaded;
}

std::pair<std::string, std::int64_t> parse_binding(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("expected NAME=VALUE, got '" + text + "'");
    const auto name = text.substr(0, eq);
    const auto value = text.substr(eq + 1);
    std::size_t used = 0;
    std::int64_t v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size()) throw UsageError("'" + value + "' is not an integer");
    return {name, v};
}

std::pair<int, int> parse_range(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw UsageError("expected LO..HI, got '" + text + "'");
    try {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        if (lo > hi) throw UsageError("empty range '" + text + "'");
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw UsageError("expected LO..HI, got '" + text + "'");
    }
}

/// The POVD file if given, otherwise |0..0> with the given classical state.
POVD initial_state(const Program& prog, const std::string& povd_path, const std::vector<std::string>& classical) {
    if (!povd_path.empty()) return load_povd(povd_path, prog).povd;
    ClassicalState sigma;
    for (const auto& b : classical) {
        const auto [name, v] = parse_binding(b);
        sigma = sigma.updated(name, v);
    }
    return POVD(sigma, CMatrix::basis_op(prog.dim(), 0, 0));
}

// --- text rendering ---

std::string display_entry(Complex z) { return format_complex(z, FormatOptions{6}); }

void display_matrix(std::ostream& out, const CMatrix& m, int indent) {
    std::vector<std::string> cells;
    std::size_t width = 0;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) {
            cells.push_back(display_entry(m(r, c)));
            width = std::max(width, cells.back().size());
        }
    for (std::size_t r = 0; r < m.rows(); ++r) {
        out << std::string(indent, ' ');
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c) out << "  ";
            out << std::setw(static_cast<int>(width)) << cells[r * m.cols() + c];
        }
        out << '\n';
    }
}

/// "[|01>]" when rho is a multiple of a computational basis projector.
std::string basis_ket(const CMatrix& rho, std::size_t qubits) {
    std::size_t hit = rho.rows();
    for (std::size_t r = 0; r < rho.rows(); ++r)
        for (std::size_t c = 0; c < rho.cols(); ++c) {
            if (std::abs(rho(r, c)) <= kEpsNum) continue;
            if (r != c || hit != rho.rows()) return {};
            hit = r;
        }
    if (hit == rho.rows()) return {};
    std::string bits;
    for (std::size_t q = qubits; q-- > 0;) bits += ((hit >> q) & 1) ? '1' : '0';
    return "[|" + bits + ">]";
}

std::string cstate_text(const ClassicalState& sigma) {
    std::string s;
    for (const auto& [k, v] : sigma.assignments()) s += (s.empty() ? "" : " ") + k + "=" + std::to_string(v);
    return s.empty() ? "(all zero)" : s;
}

void display_povd(std::ostream& out, const POVD& mu, std::size_t qubits) {
    if (mu.support_size() == 0) {
        out << "  (empty)\n";
        return;
    }
    for (const auto& [sigma, rho] : mu.entries()) {
        out << "  " << cstate_text(sigma) << "  trace " << display_entry(rho.trace().real());
        if (auto ket = basis_ket(rho, qubits); !ket.empty()) out << "  " << ket;
        out << '\n';
        display_matrix(out, rho, 4);
    }
}

std::string one_line(std::string s) {
    std::string out;
    bool space = false;
    for (char ch : s) {
        if (ch == '\n' || ch == ' ' || ch == '\t') {
            space = !out.empty();
            continue;
        }
        if (space) out += ' ';
        space = false;
        out += ch;
    }
    return out;
}

void display_trace(std::ostream& out, const TraceNode& n, std::size_t qubits, int depth) {
    out << std::string(2 * depth, ' ') << "- " << one_line(n.command) << "  | " << cstate_text(n.sigma) << " | trace "
        << display_entry(n.rho.trace().real());
    if (auto ket = basis_ket(n.rho, qubits); !ket.empty()) out << " " << ket;
    out << '\n';
    for (const auto& c : n.children) display_trace(out, c, qubits, depth + 1);
}

json povd_json(const POVD& mu, const Program& prog) { return json::parse(povd_to_json(mu, prog.qubits, -1)); }

// --- subcommands ---

struct InputArgs {
    std::string program;
    std::string povd;
    std::vector<std::string> classical;
    bool json = false;
    bool serial = false;
};

void add_input_args(CLI::App* cmd, InputArgs& a) {
    cmd->add_option("program", a.program, "QIMP program file")->required();
    auto* povd = cmd->add_option("povd", a.povd, "initial POVD as JSON");
    cmd->add_option("--classical", a.classical, "initial classical state, e.g. x0=1,x1=0 (quantum part |0..0>)")
        ->delimiter(',')
        ->excludes(povd);
    cmd->add_flag("--json", a.json, "print JSON");
    cmd->add_flag("--serial", a.serial, "use the serial kernels");
}

int cmd_run(const InputArgs& a, std::int64_t fuel, bool trace, std::ostream& out) {
    const auto prog = load_program(a.program);
    const auto mu = initial_state(prog, a.povd, a.classical);
    RunOptions opt;
    opt.fuel = fuel;
    opt.record_trace = trace;
    opt.policy = a.serial ? ExecPolicy::Serial : ExecPolicy::Parallel;
    const auto res = run(prog, mu, opt);
    if (a.json) {
        auto doc = povd_json(res.terminal, prog);
        doc["residual_mass"] = res.residual_mass;
        doc["layers"] = res.layers;
        if (trace) doc["trace"] = json::parse(trace_to_json(res.trace, -1));
        out << doc.dump(2) << '\n';
        return kAllTrue;
    }
    out << "terminal (" << res.terminal.support_size() << " entries, mass " << display_entry(total_mass(res.terminal))
        << "):\n";
    display_povd(out, res.terminal, prog.qubits.size());
    out << "residual mass: " << display_entry(res.residual_mass) << '\n';
    out << "layers: " << res.layers << '\n';
    if (trace) {
        out << "trace:\n";
        for (const auto& root : res.trace) display_trace(out, root, prog.qubits.size(), 1);
    }
    return kAllTrue;
}

int cmd_denote(const InputArgs& a, const LoopOptions& loop, std::ostream& out) {
    const auto prog = load_program(a.program);
    const auto mu = initial_state(prog, a.povd, a.classical);
    DenoteOptions opt;
    opt.loop = loop;
    opt.policy = a.serial ? ExecPolicy::Serial : ExecPolicy::Parallel;
    const auto d = denote(prog, mu, opt);
    if (a.json) {
        auto doc = povd_json(d.result, prog);
        doc["converged"] = d.converged;
        doc["iterations"] = d.iterations;
        doc["residual_mass"] = d.residual_mass;
        out << doc.dump(2) << '\n';
        return kAllTrue;
    }
    out << "result (" << d.result.support_size() << " entries, mass " << display_entry(total_mass(d.result)) << "):\n";
    display_povd(out, d.result, prog.qubits.size());
    out << "converged: " << (d.converged ? "yes" : "no") << '\n';
    out << "loop iterations: " << d.iterations << '\n';
    out << "residual mass: " << display_entry(d.residual_mass) << '\n';
    return kAllTrue;
}

struct PcArgs {
    std::string program;
    std::string assertion;
    std::string text;
    std::string output;
    bool simplify = false;
    double tol = kEpsNum;
};

int cmd_pc(const PcArgs& a, std::ostream& out) {
    const auto prog = load_program(a.program);
    const auto ctx = AssertionContext::of(prog);
    if (a.assertion.empty() == a.text.empty()) throw UsageError("give either an assertion file or --assert");
    DistAssnPtr post;
    if (a.text.empty()) {
        post = load_assertion(a.assertion, ctx);
    } else {
        post = in_file("--assert", [&] {
            auto p = parse_assertion(a.text, ctx);
            check_kinds(*p);
            return p;
        });
    }
    DistAssnPtr pre;
    try {
        pre = pc(prog, post);
    } catch (const PcError& e) {
        throw DataError(a.program + ":" + e.what());
    }
    if (a.simplify) pre = simplify_measurements(pre, a.tol);
    const auto text = pretty(*pre, ctx);
    out << text << '\n';
    if (!a.output.empty()) {
        std::ofstream f(a.output);
        if (!f) throw InputError("cannot write '" + a.output + "'");
        f << text << '\n';
    }
    if (a.simplify) {
        out << "\n// measurement operators:\n";
        for (const auto& m : measurements_of(*pre)) {
            if (m->name.empty() || m->name.front() != '$') continue;
            out << "// " << m->name << " (" << m->meas.size() << " operators)\n";
            for (std::size_t i = 0; i < m->meas.size(); ++i) {
                std::string label;
                for (auto v : m->meas.labels[i]) label += (label.empty() ? "" : ", ") + std::to_string(v);
                out << "//   label [" << label << "]\n";
                std::ostringstream grid;
                display_matrix(grid, m->meas.operators[i], 4);
                std::istringstream lines(grid.str());
                for (std::string line; std::getline(lines, line);) out << "//" << line << '\n';
            }
        }
    }
    return kAllTrue;
}

struct CheckArgs {
    std::string triple;
    std::vector<std::string> witnesses;
    std::vector<std::string> basis;
    std::size_t random = 0;
    std::size_t qubits = 0;
    std::uint64_t seed = 0;
    std::string values = "0..1";
    std::string mode = "auto";
    std::int64_t loop_cap = LoopOptions{}.cap;
    bool json = false;
    bool serial = false;
};

int exit_code_for(const CheckReport& r) {
    if (r.vacuous()) return kAllTrue;
    switch (r.overall()) {
        case Truth::True: return kAllTrue;
        case Truth::False: return kSomeFalse;
        default: return kIndeterminate;
    }
}

int cmd_check(CheckArgs a, std::ostream& out) {
    const auto t = [&] {
        try {
            return load_triple(a.triple);
        } catch (const InputError&) {
            throw;
        } catch (const ParseError& e) {
            throw DataError(a.triple + ":" + e.what());
        } catch (const FormatError& e) {
            throw DataError(a.triple + ": " + e.what());
        }
    }();
    if (a.qubits != 0 && a.qubits != t.program.qubits.size()) {
        throw UsageError("--qubits " + std::to_string(a.qubits) + " does not match the program's " +
                         std::to_string(t.program.qubits.size()) + " qubits");
    }
    if (const char* env = std::getenv("QIMP_SEED"); env && *env) {
        try {
            a.seed = std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError("QIMP_SEED is not an unsigned integer");
        }
    }
    const auto [lo, hi] = parse_range(a.values);

    std::vector<Witness> ws;
    for (const auto& path : a.witnesses) ws.push_back({fs::path(path).stem().string(), load_povd(path, t.program).povd});
    if (!a.basis.empty()) {
        for (auto& w : basis_witnesses(t.program.qubits.size(), a.basis, lo, hi)) ws.push_back(std::move(w));
    }
    if (a.random > 0) {
        WitnessOptions opt;
        opt.seed = a.seed;
        opt.vars = triple_vars(t);
        opt.lo = lo;
        opt.hi = hi;
        for (auto& w : random_witnesses(a.random, t.program.qubits.size(), opt)) ws.push_back(std::move(w));
    }

    CheckMode mode = CheckMode::Semantic;
    if (a.mode == "auto") mode = is_loop_free(*t.program.body) ? CheckMode::Both : CheckMode::Semantic;
    else if (a.mode == "pc") mode = CheckMode::Pc;
    else if (a.mode == "both") mode = CheckMode::Both;
    else if (a.mode != "semantic") throw UsageError("unknown mode '" + a.mode + "'");

    CheckOptions opt;
    opt.denote.loop.cap = a.loop_cap;
    opt.policy = a.serial ? ExecPolicy::Serial : ExecPolicy::Parallel;
    opt.denote.policy = opt.policy;
    CheckReport report;
    try {
        report = check_triple(t, ws, mode, opt);
    } catch (const PcError& e) {
        throw DataError(t.program_path + ":" + e.what());
    }

    if (a.json) {
        out << report_to_json(report, t) << '\n';
        return exit_code_for(report);
    }
    const auto ctx = AssertionContext::of(t.program);
    out << "triple " << a.triple << " (" << to_string(mode) << " mode, " << ws.size() << " witnesses)\n";
    for (const auto& v : report.verdicts) {
        out << "  " << std::left << std::setw(14) << to_string(v.verdict) << std::right << v.id;
        if (v.pre != Truth::True) out << "  [pre " << to_string(v.pre) << "]";
        if (!v.details.empty()) out << "  " << v.details;
        out << '\n';
        if (v.verdict == Truth::False && v.output) {
            out << "    counterexample output:\n";
            std::ostringstream shown;
            display_povd(shown, *v.output, t.program.qubits.size());
            std::istringstream lines(shown.str());
            for (std::string line; std::getline(lines, line);) out << "    " << line << '\n';
        }
    }
    if (report.vacuous()) {
        out << "verdict: vacuous (no witnesses)\n";
    } else {
        out << "verdict: " << to_string(report.overall()) << " (" << report.count(Truth::True) << " true, "
            << report.count(Truth::False) << " false, " << report.count(Truth::Indeterminate) << " indeterminate)\n";
    }
    return exit_code_for(report);
}

int cmd_parse(const std::string& path, std::string kind, const std::string& program, std::ostream& out) {
    if (kind == "auto") {
        const auto ext = fs::path(path).extension().string();
        if (ext == ".qimp") kind = "program";
        else if (ext == ".qassn") kind = "assertion";
        else if (ext == ".qhl") kind = "triple";
        else if (ext == ".json") kind = "povd";
        else throw UsageError("cannot tell the kind of '" + path + "'; use --kind");
    }
    if (kind == "program") {
        out << pretty(load_program(path)) << '\n';
    } else if (kind == "assertion") {
        Program prog;
        if (!program.empty()) prog = load_program(program);
        const auto ctx = AssertionContext::of(prog);
        out << pretty(*load_assertion(path, ctx), ctx) << '\n';
    } else if (kind == "triple") {
        Triple t;
        const auto text = read_text(path);
        t = in_file(path, [&] { return parse_triple(text, fs::path(path).parent_path().string()); });
        const auto ctx = AssertionContext::of(t.program);
        out << "prog: " << t.program_path << "\npre: " << pretty(*t.pre, ctx) << "\npost: " << pretty(*t.post, ctx)
            << '\n';
    } else if (kind == "povd") {
        const auto text = read_text(path);
        const auto loaded = in_file(path, [&] { return povd_from_json(text); });
        out << povd_to_json(loaded.povd, loaded.qubits) << '\n';
    } else {
        throw UsageError("unknown kind '" + kind + "'");
    }
    return kAllTrue;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    reset_fresh_names();
    CLI::App app{"Run, denote and verify QIMP classical-quantum programs", "qimp"};
    app.require_subcommand(1);

    InputArgs run_args;
    std::int64_t fuel = RunOptions{}.fuel;
    bool trace = false;
    auto* run_cmd = app.add_subcommand("run", "execute with the operational semantics");
    add_input_args(run_cmd, run_args);
    run_cmd->add_option("--fuel", fuel, "breadth-first layers before giving up")->check(CLI::PositiveNumber);
    run_cmd->add_flag("--trace", trace, "print the execution tree");

    InputArgs denote_args;
    LoopOptions loop;
    auto* denote_cmd = app.add_subcommand("denote", "evaluate the denotational semantics");
    add_input_args(denote_cmd, denote_args);
    denote_cmd->add_option("--loop-cap", loop.cap, "iteration cap per loop")->check(CLI::PositiveNumber);
    denote_cmd->add_option("--loop-tol", loop.tol, "mass left in a loop that counts as converged")
        ->check(CLI::NonNegativeNumber);

    PcArgs pc_args;
    auto* pc_cmd = app.add_subcommand("pc", "compute a precondition of a loop-free program");
    pc_cmd->add_option("program", pc_args.program, "QIMP program file")->required();
    pc_cmd->add_option("assertion", pc_args.assertion, "postcondition file");
    pc_cmd->add_option("--assert", pc_args.text, "postcondition text");
    pc_cmd->add_flag("--simplify", pc_args.simplify, "drop zero measurement operators and show the rest");
    pc_cmd->add_option("--tol", pc_args.tol, "largest entry of an operator treated as zero");
    pc_cmd->add_option("-o,--output", pc_args.output, "also write the precondition to a file");

    CheckArgs check_args;
    auto* check_cmd = app.add_subcommand("check", "check a Hoare triple on witness states");
    check_cmd->add_option("triple", check_args.triple, "triple file (.qhl)")->required();
    check_cmd->add_option("--witness", check_args.witnesses, "witness POVD files");
    check_cmd->add_option("--basis", check_args.basis, "all assignments of these variables over --values, with |0..0>")
        ->delimiter(',');
    check_cmd->add_option("--random", check_args.random, "number of random witnesses");
    check_cmd->add_option("--qubits", check_args.qubits, "expected qubit count");
    check_cmd->add_option("--seed", check_args.seed, "seed for random witnesses (QIMP_SEED overrides)");
    check_cmd->add_option("--values", check_args.values, "classical value range LO..HI");
    check_cmd->add_option("--mode", check_args.mode, "auto, semantic, pc or both")
        ->check(CLI::IsMember({"auto", "semantic", "pc", "both"}));
    check_cmd->add_option("--loop-cap", check_args.loop_cap, "iteration cap per loop")->check(CLI::PositiveNumber);
    check_cmd->add_flag("--json", check_args.json, "print the report as JSON");
    check_cmd->add_flag("--serial", check_args.serial, "check witnesses one at a time");

    std::string parse_path;
    std::string parse_kind = "auto";
    std::string parse_program_path;
    auto* parse_cmd = app.add_subcommand("parse", "parse a file and print it back");
    parse_cmd->add_option("file", parse_path, "program, assertion, triple or POVD file")->required();
    parse_cmd->add_option("--kind", parse_kind, "auto, program, assertion, triple or povd");
    parse_cmd->add_option("--program", parse_program_path, "program giving the qubits of an assertion");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*run_cmd) return cmd_run(run_args, fuel, trace, out);
        if (*denote_cmd) return cmd_denote(denote_args, loop, out);
        if (*pc_cmd) return cmd_pc(pc_args, out);
        if (*check_cmd) return cmd_check(check_args, out);
        return cmd_parse(parse_path, parse_kind, parse_program_path, out);
    } catch (const UsageError& e) {
        err << "qimp: " << e.what() << '\n';
        return kUsage;
    } catch (const InputError& e) {
        err << "qimp: " << e.what() << '\n';
        return kNoInput;
    } catch (const std::exception& e) {
        err << "qimp: " << e.what() << '\n';
        return kDataError;
    }
}

}  // namespace qimp::cli
