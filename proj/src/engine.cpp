#include "engine.hpp"

#include <cstdlib>

#include "kdv.hpp"
#include "mkdv.hpp"
#include "textio.hpp"
#include "toda.hpp"

namespace qlax {

namespace {

Rat parse_rat(const std::string& s) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return Rat(BigInt(s));
    return Rat(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
}

void validate(const RunConfig& c) {
    if (c.N < 2 || c.N > 6) throw arith_error("config: N must be between 2 and 6");
    if (c.window < 0 || c.window > 16) throw arith_error("config: window must be between 0 and 16");
    if (c.depth < 0 || c.depth > 64) throw arith_error("config: depth must be between 0 and 64");
    if (c.degcap < 1 || c.degcap > 8) throw arith_error("config: degcap must be between 1 and 8");
    if (c.hprec < 2 || c.hprec > 24) throw arith_error("config: hprec must be between 2 and 24");
    if (c.mode != "exact" && c.mode != "numeric") throw arith_error("config: mode must be exact or numeric");
    if (c.format != "text" && c.format != "json") throw arith_error("config: format must be text or json");
    if (c.mode == "numeric") {
        Rat v = c.q0;
        if (v == 0 || v == 1 || v == -1) throw arith_error("config: q0 must avoid roots of unity");
    }
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
    RunConfig c;
    if (const char* e = std::getenv("QLAX_Q0")) c.q0 = parse_rat(e);
    if (const char* e = std::getenv("QLAX_DEGCAP")) c.degcap = std::atoi(e);
    if (j.contains("N")) c.N = j.at("N").get<int>();
    if (j.contains("window")) c.window = j.at("window").get<int>();
    if (j.contains("depth")) c.depth = j.at("depth").get<int>();
    if (j.contains("degcap")) c.degcap = j.at("degcap").get<int>();
    if (j.contains("hprec")) c.hprec = j.at("hprec").get<int>();
    if (j.contains("mode")) c.mode = j.at("mode").get<std::string>();
    if (j.contains("q0")) c.q0 = parse_rat(j.at("q0").get<std::string>());
    if (j.contains("seed")) c.seed = j.at("seed").get<uint64_t>();
    if (j.contains("timings")) c.emit_ms = j.at("timings").get<bool>();
    if (j.contains("command")) c.command = j.at("command").get<std::string>();
    if (j.contains("suite")) c.suite = j.at("suite").get<std::string>();
    if (j.contains("format")) c.format = j.at("format").get<std::string>();
    if (j.contains("n")) c.n = j.at("n").get<int>();
    if (j.contains("arg")) c.arg = j.at("arg").get<std::string>();
    validate(c);
    return c;
}

namespace {

CommandResult report_result(const Report& r, const RunConfig& cfg) {
    CommandResult out;
    out.json = r.to_json();
    out.text = cfg.format == "json" ? out.json.dump(2) + "\n" : r.to_text();
    out.check_failure = !r.pass;
    return out;
}

CommandResult cmd_root(const RunConfig& cfg) {
    PdOp<Series<ExactField>> L;
    if (!cfg.arg.empty())
        L = parse_operator(cfg.arg, cfg.window);
    else
        L = KdVState<ExactField>::make(cfg.N, cfg.window, true).L;
    int N = L.top();
    int depth = cfg.depth > 0 ? cfg.depth : default_root_depth(cfg.n, N);
    auto P = nth_root(L, N, depth);
    CommandResult out;
    out.text = op_str(P) + "\n";
    out.json["operator"] = op_str(P);
    out.json["depth"] = depth;
    return out;
}

CommandResult cmd_flow(const RunConfig& cfg) {
    auto S = KdVState<ExactField>::make(cfg.N, cfg.window, true);
    auto fl = qkdv_flow(S, cfg.n, cfg.depth > 0 ? cfg.depth : -1);
    CommandResult out;
    std::ostringstream os;
    for (auto& [i, s] : fl.rhs) {
        os << "d/dtau_" << cfg.n << " t" << i << "(z) = " << s.str() << "\n";
        out.json["flow"]["t" + std::to_string(i)] = s.str();
    }
    out.text = os.str();
    return out;
}

CommandResult cmd_ham(const RunConfig& cfg) {
    auto S = KdVState<ExactField>::make(cfg.N, cfg.window, true);
    auto H = hamiltonian_res(S, cfg.n, cfg.depth > 0 ? cfg.depth : -1);
    CommandResult out;
    out.text = "H_" + std::to_string(cfg.n) + " = " + H.value.str() + "\n";
    out.json["hamiltonian"] = H.value.str();
    return out;
}

CommandResult cmd_bracket(const RunConfig& cfg) {
    // arg: "<table>:<gen>,<gen>", e.g. "second:t1[2],t1[-2]"
    auto colon = cfg.arg.find(':');
    std::string table = colon == std::string::npos ? "second" : cfg.arg.substr(0, colon);
    std::string rest = colon == std::string::npos ? cfg.arg : cfg.arg.substr(colon + 1);
    auto comma = rest.find(',');
    if (comma == std::string::npos) throw arith_error("bracket: expected \"table:gen,gen\"");
    Gen a = parse_generator(rest.substr(0, comma));
    Gen b = parse_generator(rest.substr(comma + 1));
    KernelTable t;
    if (table == "first")
        t = kdv_first_bracket(cfg.N, true);
    else if (table == "second")
        t = kdv_second_bracket(cfg.N, true);
    else if (table == "heisenberg")
        t = mkdv_bracket(cfg.N);
    else
        throw arith_error("bracket: unknown table " + table);
    Poly<ExactField> v = mode_bracket<ExactField>(t, a, b, cfg.window);
    CommandResult out;
    out.text = "{" + a.str() + ", " + b.str() + "}_" + table + " = " + v.str() + "\n";
    out.json["bracket"] = v.str();
    return out;
}

CommandResult cmd_miura(const RunConfig& cfg) {
    auto M = MKdVState<ExactField>::make(cfg.N, cfg.window, false);
    CommandResult out;
    std::ostringstream os;
    for (int j = 1; j <= cfg.N; ++j) {
        Series<ExactField> img = miura_t_image(M, 1, j);
        os << "t" << j << "(z) -> " << img.str() << "\n";
        out.json["images"]["t" + std::to_string(j)] = img.str();
    }
    out.text = os.str();
    return out;
}

CommandResult cmd_toda(const RunConfig& cfg) {
    std::string mode = cfg.arg.empty() ? "affine" : cfg.arg;
    CommandResult out;
    std::ostringstream os;
    if (mode == "sine-gordon") {
        auto ctx = make_toda_ctx<ExactField>(2, cfg.window, cfg.degcap, true);
        os << "d/dt lam1(z) = " << toda_rhs(ctx, 1).str() << "\n";
        out.json["flow"]["lam1"] = toda_rhs(ctx, 1).str();
    } else if (mode == "affine" || mode == "finite") {
        auto ctx = make_toda_ctx<ExactField>(cfg.N, cfg.window, cfg.degcap);
        for (int i = 1; i <= cfg.N; ++i) {
            QExt<ExactField> rhs;
            if (mode == "affine") {
                rhs = toda_rhs(ctx, i);
            } else {
                Series<ExactField> lam_i = ctx->lam[static_cast<size_t>(i)];
                if (i > 1)
                    rhs += QExt<ExactField>::from_series(ctx, lam_i) * screening_density(ctx, i - 1);
                if (i < cfg.N)
                    rhs -= QExt<ExactField>::from_series(ctx, lam_i) * screening_density(ctx, i);
            }
            os << "d/dt lam" << i << "(z) = " << rhs.str() << "\n";
            out.json["flow"]["lam" + std::to_string(i)] = rhs.str();
        }
    } else {
        throw arith_error("toda: unknown mode " + mode + " (affine|finite|sine-gordon)");
    }
    out.text = os.str();
    return out;
}

CommandResult cmd_limit(const RunConfig& cfg) {
    RunConfig c = cfg;
    c.suite = "limits";
    Report r = verify_limits(c);
    if (!cfg.arg.empty()) {
        // keep only the requested target's checks
        std::map<std::string, std::string> prefix = {{"virasoro", "virasoro"},
                                                     {"heisenberg", "heisenberg"},
                                                     {"toda", "toda"},
                                                     {"hamiltonians", "hamiltonian"}};
        auto it = prefix.find(cfg.arg);
        if (it == prefix.end()) throw arith_error("limit: unknown target " + cfg.arg);
        Report filtered;
        filtered.suite = r.suite;
        filtered.config = r.config;
        filtered.emit_ms = r.emit_ms;
        for (auto& chk : r.checks)
            if (chk.name.rfind(it->second, 0) == 0 || chk.name.rfind("probe", 0) == 0) {
                filtered.checks.push_back(chk);
                if (chk.status != "pass" && chk.status != "note") filtered.pass = false;
            }
        r = filtered;
    }
    return report_result(r, cfg);
}

}  // namespace

CommandResult run_command(const RunConfig& cfg) {
    if (cfg.command == "verify") return report_result(run_suite(cfg), cfg);
    if (cfg.command == "limit") return cmd_limit(cfg);
    if (cfg.command == "root") return cmd_root(cfg);
    if (cfg.command == "flow") return cmd_flow(cfg);
    if (cfg.command == "ham") return cmd_ham(cfg);
    if (cfg.command == "bracket") return cmd_bracket(cfg);
    if (cfg.command == "miura") return cmd_miura(cfg);
    if (cfg.command == "toda") return cmd_toda(cfg);
    throw arith_error("unknown command: " + cfg.command);
}

}  // namespace qlax
