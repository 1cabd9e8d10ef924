// Command-line front end. Talks to the engine exclusively through the
// public C interface in qlax/qlax.h.

#include <cstdio>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qlax/qlax.h"

namespace {

struct CommonOpts {
    int N = 2;
    int window = 2;
    int depth = 0;
    int degcap = 3;
    int hprec = 6;
    std::string mode = "exact";
    std::string q0 = "3/2";
    std::uint64_t seed = 12345;
    std::string format = "text";
    bool no_timings = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--N", o.N, "operator order N");
    cmd->add_option("--window", o.window, "point window for Fourier modes");
    cmd->add_option("--depth", o.depth, "operator truncation depth (0 = auto)");
    cmd->add_option("--degcap", o.degcap, "degree cap for geometric inverses");
    cmd->add_option("--hprec", o.hprec, "h-series order for the limit checks");
    cmd->add_option("--mode", o.mode, "coefficient mode: exact | numeric")
        ->check(CLI::IsMember({"exact", "numeric"}));
    cmd->add_option("--q0", o.q0, "numeric-mode evaluation point (rational)");
    cmd->add_option("--seed", o.seed, "seed for randomized spot checks");
    cmd->add_option("--format", o.format, "output format: text | json")->check(CLI::IsMember({"text", "json"}));
    cmd->add_flag("--no-timings", o.no_timings, "suppress timings for byte-stable output");
}

nlohmann::json base_request(const CommonOpts& o, const std::string& command) {
    nlohmann::json j;
    j["command"] = command;
    j["N"] = o.N;
    j["window"] = o.window;
    j["depth"] = o.depth;
    j["degcap"] = o.degcap;
    j["hprec"] = o.hprec;
    j["mode"] = o.mode;
    j["q0"] = o.q0;
    j["seed"] = o.seed;
    j["format"] = o.format;
    if (o.no_timings) j["timings"] = false;
    return j;
}

int run(const nlohmann::json& request, const std::string& format) {
    qlax_session* s = qlax_session_new();
    if (!s) {
        std::fprintf(stderr, "error: out of memory\n");
        return 2;
    }
    int rc = qlax_execute(s, request.dump().c_str());
    if (rc == QLAX_OK || rc == QLAX_ERR_CHECK_FAILED) {
        std::fputs(format == "json" && rc == QLAX_OK ? qlax_output_json(s) : qlax_output_text(s), stdout);
        if (format == "json" && rc == QLAX_OK) std::fputc('\n', stdout);
        if (rc == QLAX_ERR_CHECK_FAILED && format == "json") {
            // the text channel already carries the JSON report for verify runs
        }
    } else {
        std::fprintf(stderr, "error: %s\n", qlax_last_error(s));
    }
    qlax_session_free(s);
    if (rc == QLAX_OK) return 0;
    if (rc == QLAX_ERR_CHECK_FAILED) return 1;
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact verification engine for q-deformed KdV, mKdV and affine Toda hierarchies"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qlax_version()));

    CommonOpts o;

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    std::string suite = "all";
    verify->add_option("suite", suite, "kdv | mkdv | toda | poisson | limits | all")
        ->check(CLI::IsMember({"kdv", "mkdv", "toda", "poisson", "limits", "all"}));
    add_common(verify, o);

    auto* root = app.add_subcommand("root", "N-th root of a q-difference operator");
    std::string op_text;
    root->add_option("--op", op_text, "operator text, e.g. \"D^2 - t1(z) D + 1\"");
    add_common(root, o);

    auto* flow = app.add_subcommand("flow", "right-hand side of the n-th Lax flow");
    int n = 1;
    flow->add_option("--n", n, "flow index");
    add_common(flow, o);

    auto* ham = app.add_subcommand("ham", "hamiltonian H_n");
    ham->add_option("--n", n, "hamiltonian index");
    add_common(ham, o);

    auto* bracket = app.add_subcommand("bracket", "mode bracket of two generators");
    std::string pair, table = "second";
    bracket->add_option("--pair", pair, "generator pair, e.g. \"t1[2],t1[-2]\"")->required();
    bracket->add_option("--table", table, "first | second | heisenberg")
        ->check(CLI::IsMember({"first", "second", "heisenberg"}));
    add_common(bracket, o);

    auto* miura = app.add_subcommand("miura", "t images of the first Miura transformation");
    add_common(miura, o);

    auto* toda = app.add_subcommand("toda", "right-hand side of the Toda flow");
    std::string toda_mode = "affine";
    toda->add_option("--toda-mode", toda_mode, "affine | finite | sine-gordon")
        ->check(CLI::IsMember({"affine", "finite", "sine-gordon"}));
    add_common(toda, o);

    auto* limit = app.add_subcommand("limit", "classical-limit checks");
    std::string target;
    limit->add_option("--target", target, "virasoro | heisenberg | toda | hamiltonians");
    add_common(limit, o);

    CLI11_PARSE(app, argc, argv);

    nlohmann::json req;
    if (verify->parsed()) {
        req = base_request(o, "verify");
        req["suite"] = suite;
    } else if (root->parsed()) {
        req = base_request(o, "root");
        if (!op_text.empty()) req["arg"] = op_text;
    } else if (flow->parsed()) {
        req = base_request(o, "flow");
        req["n"] = n;
    } else if (ham->parsed()) {
        req = base_request(o, "ham");
        req["n"] = n;
    } else if (bracket->parsed()) {
        req = base_request(o, "bracket");
        req["arg"] = table + ":" + pair;
    } else if (miura->parsed()) {
        req = base_request(o, "miura");
    } else if (toda->parsed()) {
        req = base_request(o, "toda");
        req["arg"] = toda_mode;
    } else if (limit->parsed()) {
        req = base_request(o, "limit");
        if (!target.empty()) req["arg"] = target;
    }
    return run(req, o.format);
}
