#include "report.hpp"

#include <sstream>

namespace qlax {

nlohmann::json Report::to_json() const {
    nlohmann::json j;
    j["suite"] = suite;
    j["config"] = config;
    j["checks"] = nlohmann::json::array();
    for (const auto& c : checks) {
        nlohmann::json jc;
        jc["name"] = c.name;
        jc["anchor"] = c.anchor;
        jc["status"] = c.status;
        if (!c.witness.empty()) jc["witness"] = c.witness;
        jc["ms"] = emit_ms ? c.ms : 0.0;
        j["checks"].push_back(jc);
    }
    j["pass"] = pass;
    return j;
}

std::string Report::to_text() const {
    std::ostringstream os;
    os << "suite " << suite << "\n";
    for (const auto& c : checks) {
        os << "  [" << (c.status == "pass" ? "PASS" : (c.status == "note" ? "NOTE" : "FAIL")) << "] " << c.name
           << " (" << c.anchor << ")";
        if (emit_ms && c.status != "note") {
            std::ostringstream t;
            t.setf(std::ios::fixed);
            t.precision(1);
            t << c.ms;
            os << " " << t.str() << "ms";
        }
        os << "\n";
        if (!c.witness.empty()) os << "      " << c.witness << "\n";
    }
    os << (pass ? "PASS" : "FAIL") << "\n";
    return os.str();
}

void SuiteRunner::check(const std::string& name, const std::string& anchor,
                        const std::function<std::string()>& body) {
    CheckRecord rec;
    rec.name = name;
    rec.anchor = anchor;
    auto t0 = std::chrono::steady_clock::now();
    try {
        std::string w = body();
        rec.status = w.empty() ? "pass" : "fail";
        rec.witness = w;
    } catch (const std::exception& e) {
        rec.status = "error";
        rec.witness = e.what();
    }
    auto t1 = std::chrono::steady_clock::now();
    rec.ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    if (rec.status != "pass") rep_.pass = false;
    rep_.checks.push_back(std::move(rec));
}

void SuiteRunner::note(const std::string& name, const std::string& anchor, const std::string& text) {
    CheckRecord rec;
    rec.name = name;
    rec.anchor = anchor;
    rec.status = "note";
    rec.witness = text;
    rep_.checks.push_back(std::move(rec));
}

}  // namespace qlax
