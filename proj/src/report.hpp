#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

namespace qlax {

struct CheckRecord {
    std::string name;
    std::string anchor;   // stable slug of the claim being verified
    std::string status;   // pass | fail | error
    std::string witness;  // counterexample / note, empty when clean
    double ms = 0.0;
};

struct Report {
    std::string suite;
    nlohmann::json config;
    std::vector<CheckRecord> checks;
    bool pass = true;
    bool emit_ms = true;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

// Runs one named check, catching failures into the record. The body returns
// an empty string on success and a witness string on failure.
class SuiteRunner {
public:
    explicit SuiteRunner(std::string suite_name) { rep_.suite = std::move(suite_name); }

    void check(const std::string& name, const std::string& anchor, const std::function<std::string()>& body);
    void note(const std::string& name, const std::string& anchor, const std::string& text);

    Report& report() { return rep_; }

private:
    Report rep_;
};

}  // namespace qlax
