#include "qlax/qlax.h"

#include "engine.hpp"
#include "textio.hpp"

struct qlax_session {
    std::string text;
    std::string json;
    std::string error;
};

extern "C" {

const char* qlax_version(void) { return "1.0.0"; }

qlax_session* qlax_session_new(void) { return new (std::nothrow) qlax_session(); }

void qlax_session_free(qlax_session* s) { delete s; }

int qlax_execute(qlax_session* s, const char* request_json) {
    if (!s) return QLAX_ERR_INVALID_ARGUMENT;
    s->text.clear();
    s->json.clear();
    s->error.clear();
    if (!request_json) {
        s->error = "null request";
        return QLAX_ERR_INVALID_ARGUMENT;
    }
    try {
        nlohmann::json j = nlohmann::json::parse(request_json);
        qlax::RunConfig cfg = qlax::config_from_json(j);
        qlax::CommandResult r = qlax::run_command(cfg);
        s->text = r.text;
        s->json = r.json.dump(2);
        return r.check_failure ? QLAX_ERR_CHECK_FAILED : QLAX_OK;
    } catch (const nlohmann::json::exception& e) {
        s->error = std::string("invalid request: ") + e.what();
        return QLAX_ERR_INVALID_ARGUMENT;
    } catch (const qlax::parse_error& e) {
        s->error = e.what();
        return QLAX_ERR_PARSE;
    } catch (const qlax::arith_error& e) {
        s->error = e.what();
        // config errors are invalid arguments; anything else is internal
        return std::string(e.what()).rfind("config:", 0) == 0 ? QLAX_ERR_INVALID_ARGUMENT : QLAX_ERR_INTERNAL;
    } catch (const std::exception& e) {
        s->error = e.what();
        return QLAX_ERR_INTERNAL;
    }
}

const char* qlax_output_text(const qlax_session* s) { return s ? s->text.c_str() : ""; }

const char* qlax_output_json(const qlax_session* s) { return s ? s->json.c_str() : ""; }

const char* qlax_last_error(const qlax_session* s) { return s ? s->error.c_str() : ""; }

}  // extern "C"
