#pragma once

#include <cstdio>
#include <string>
#include <vector>

namespace kvf {

/// Minimal JSON emitter with insertion-order keys and fixed 17-significant-
/// digit scientific floats, so reports diff bytewise across runs and
/// languages. Only the shapes the reports need are supported.
class JsonWriter {
public:
    std::string str() const { return out_; }

    static std::string number(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.16e", v);
        return buf;
    }

    void begin_object() { open('{'); }
    void end_object() { close('}'); }
    void begin_array() { open('['); }
    void end_array() { close(']'); }

    void key(const std::string& k) {
        comma();
        out_ += quote(k);
        out_ += ':';
        just_keyed_ = true;
    }

    void value(double v) { raw(number(v)); }
    void value(int v) { raw(std::to_string(v)); }
    void value(long long v) { raw(std::to_string(v)); }
    void value(unsigned long long v) { raw(std::to_string(v)); }
    void value(bool v) { raw(v ? "true" : "false"); }
    void value(const std::string& s) { raw(quote(s)); }
    void value(const char* s) { raw(quote(s)); }

    template <class T>
    void field(const std::string& k, const T& v) {
        key(k);
        value(v);
    }

    template <class Seq>
    void number_array_field(const std::string& k, const Seq& vals) {
        key(k);
        begin_array();
        for (double v : vals) value(v);
        end_array();
    }

private:
    static std::string quote(const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') q += '\\';
            q += c;
        }
        q += '"';
        return q;
    }

    void comma() {
        if (need_comma_) out_ += ',';
        need_comma_ = false;
    }

    void open(char c) {
        comma();
        out_ += c;
        need_comma_ = false;
        just_keyed_ = false;
    }

    void close(char c) {
        out_ += c;
        need_comma_ = true;
    }

    void raw(const std::string& s) {
        if (!just_keyed_) comma();
        just_keyed_ = false;
        out_ += s;
        need_comma_ = true;
    }

    std::string out_;
    bool need_comma_ = false;
    bool just_keyed_ = false;
};

/// One named check inside a verification report.
struct CheckRecord {
    std::string name;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::string command;
    std::string config_echo;
    std::vector<CheckRecord> checks;
    std::vector<std::pair<std::string, long long>> int_metrics;
    std::vector<std::pair<std::string, double>> real_metrics;

    bool overall_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    void add(const std::string& name, double max_residual, double tolerance) {
        checks.push_back({name, max_residual, tolerance, max_residual <= tolerance});
    }

    void add_flag(const std::string& name, bool pass) {
        checks.push_back({name, pass ? 0.0 : 1.0, 0.5, pass});
    }

    /// Stable serialization; deliberately carries no wall-time field so that
    /// identical configurations produce byte-identical reports.
    std::string to_json() const {
        JsonWriter w;
        w.begin_object();
        w.field("command", command);
        w.field("config", config_echo);
        w.key("checks");
        w.begin_array();
        for (const auto& c : checks) {
            w.begin_object();
            w.field("name", c.name);
            w.field("max_residual", c.max_residual);
            w.field("tolerance", c.tolerance);
            w.field("pass", c.pass);
            w.end_object();
        }
        w.end_array();
        if (!int_metrics.empty() || !real_metrics.empty()) {
            w.key("metrics");
            w.begin_object();
            for (const auto& [k, v] : int_metrics) w.field(k, v);
            for (const auto& [k, v] : real_metrics) w.field(k, v);
            w.end_object();
        }
        w.field("overall_pass", overall_pass());
        w.end_object();
        return w.str() + "\n";
    }

    std::string to_csv() const {
        std::string out = "name,max_residual,tolerance,pass\n";
        for (const auto& c : checks) {
            out += c.name + "," + JsonWriter::number(c.max_residual) + "," +
                   JsonWriter::number(c.tolerance) + "," + (c.pass ? "1" : "0") + "\n";
        }
        return out;
    }
};

} // namespace kvf
