#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "lapbounds/bounds.hpp"
#include "lapbounds/errors.hpp"
#include "lapbounds/local_model.hpp"
#include "lapbounds/oracle.hpp"

namespace lapbounds {

// All reals are emitted with 17 significant digits, enough to round-trip
// IEEE doubles exactly. The writer below is used for every emitted document
// so JSON and CSV outputs of one run print identical numerals.
inline std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Minimal JSON writer: objects and arrays assembled as strings, numbers
// rendered through format_real. Parsing uses nlohmann::json.
class json_writer {
public:
    json_writer& begin_object() { return emit("{"); }
    json_writer& end_object() { return close("}"); }
    json_writer& begin_array() { return emit("["); }
    json_writer& end_array() { return close("]"); }

    json_writer& key(const std::string& k) {
        maybe_comma();
        out_ += '"' + escape(k) + "\":";
        fresh_ = true;
        return *this;
    }
    json_writer& value(double v) { return scalar(format_real(v)); }
    json_writer& value(int v) { return scalar(std::to_string(v)); }
    json_writer& value(bool v) { return scalar(v ? "true" : "false"); }
    json_writer& value(const std::string& s) { return scalar('"' + escape(s) + '"'); }
    json_writer& value(const char* s) { return value(std::string(s)); }

    const std::string& str() const { return out_; }

private:
    static std::string escape(const std::string& s) {
        std::string r;
        for (char c : s) {
            if (c == '"' || c == '\\') r.push_back('\\');
            r.push_back(c);
        }
        return r;
    }
    void maybe_comma() {
        if (!fresh_ && !out_.empty() && out_.back() != '{' && out_.back() != '[' &&
            out_.back() != ':')
            out_ += ',';
        fresh_ = false;
    }
    json_writer& emit(const char* tok) {
        maybe_comma();
        out_ += tok;
        fresh_ = true;
        return *this;
    }
    json_writer& close(const char* tok) {
        out_ += tok;
        fresh_ = false;
        return *this;
    }
    json_writer& scalar(const std::string& s) {
        maybe_comma();
        out_ += s;
        return *this;
    }
    std::string out_;
    bool fresh_ = true;
};

inline void write_local_expansion(json_writer& w, const local_expansion& local) {
    w.begin_object();
    w.key("d").value(local.d);
    w.key("hessian").begin_array();
    for (double v : local.H.entries()) w.value(v);
    w.end_array();
    w.key("third_tensor").begin_array();
    for (double v : local.T3.entries()) w.value(v);
    w.end_array();
    w.key("C").value(local.C);
    w.key("alpha").value(local.alpha);
    w.key("r").value(local.r);
    w.key("delta").value(local.delta);
    w.key("Delta").value(local.Delta);
    w.key("n1").value(local.n1);
    w.key("I_n1").value(local.I_n1);
    w.end_object();
}

inline std::string local_expansion_to_json(const local_expansion& local) {
    json_writer w;
    write_local_expansion(w, local);
    return w.str();
}

inline local_expansion local_expansion_from_json(const nlohmann::json& j) {
    try {
        const int d = j.at("d").get<int>();
        return local_expansion(
            d, sym_matrix(d, j.at("hessian").get<std::vector<double>>()),
            third_tensor(d, j.at("third_tensor").get<std::vector<double>>()),
            j.at("C").get<double>(), j.at("alpha").get<double>(), j.at("r").get<double>(),
            j.at("delta").get<double>(), j.at("Delta").get<double>(),
            j.at("n1").get<double>(), j.at("I_n1").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw invalid_input(std::string("local expansion JSON: ") + e.what());
    }
}

inline local_expansion local_expansion_from_json_text(const std::string& text) {
    return local_expansion_from_json(nlohmann::json::parse(text));
}

inline void write_constants(json_writer& w, const bound_constants& k) {
    w.begin_object();
    w.key("xi").value(k.xi);
    w.key("K_alpha1").value(k.K_alpha1);
    w.key("K_alpha2").value(k.K_alpha2);
    w.key("K_1").value(k.K_1);
    w.key("K_l").value(k.K_l);
    w.key("K_u").value(k.K_u);
    w.key("n0").value(k.n0);
    w.key("n2").value(k.n2);
    w.key("relaxation").begin_object();
    w.key("a").value(k.relaxation.a);
    w.key("x_a").value(k.relaxation.x_a);
    w.end_object();
    w.key("alpha").value(k.alpha);
    w.key("scale").value(k.scale);
    w.end_object();
}

inline void write_g_constants(json_writer& w, const g_constants& k) {
    w.begin_object();
    w.key("K_2").value(k.K_2);
    w.key("K_3").value(k.K_3);
    w.key("K_alpha3").value(k.K_alpha3);
    w.key("K_4").value(k.K_4);
    w.key("K_alpha5").value(k.K_alpha5);
    w.key("K_alpha6").value(k.K_alpha6);
    w.key("K_ul").value(k.K_ul);
    w.key("n4").value(k.n4);
    w.end_object();
}

inline void write_bracket(json_writer& w, const bracket& b) {
    w.begin_object();
    w.key("n").value(b.n);
    w.key("leading").value(b.leading);
    w.key("rel_lo").value(b.rel_lo);
    w.key("rel_hi").value(b.rel_hi);
    w.key("abs_lo").value(b.abs_lo);
    w.key("abs_hi").value(b.abs_hi);
    w.key("valid").value(b.valid);
    w.end_object();
}

// Empirical records stream as JSON lines.
inline std::string empirical_record_to_json(const empirical_error_record& r) {
    json_writer w;
    w.begin_object();
    w.key("n").value(r.n);
    w.key("I_oracle").value(r.I_oracle);
    w.key("leading").value(r.leading);
    w.key("E").value(r.E);
    w.key("method").value(to_string(r.method));
    w.end_object();
    return w.str();
}

}  // namespace lapbounds
