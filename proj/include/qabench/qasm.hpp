#pragma once

// OpenQASM 2.0 subset reader/writer.
//
// Supported statements: OPENQASM 2.0; include (ignored with a warning);
// one qreg and one creg; gates h, x, sx, rz, rx, u, cx, cp (alias cu1),
// swap; measure; barrier. Angle expressions are decimal literals or
// rational multiples of pi (pi, -pi/2, 3*pi/4, 2*pi, ...).
//
// The parser never throws on malformed input. It reports diagnostics with
// line/column positions and keeps scanning after an error so one pass can
// surface several problems.

#include <cctype>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qabench/circuit.hpp"

namespace qabench {

enum class Severity { Warning, Error };

struct ParseDiagnostic {
    Severity severity = Severity::Error;
    int line = 0;
    int col = 0;
    std::string message;

    std::string str() const {
        std::ostringstream os;
        os << (severity == Severity::Error ? "error" : "warning") << " at " << line << ":" << col
           << ": " << message;
        return os.str();
    }
};

struct ParseResult {
    std::optional<Circuit> circuit;
    std::vector<ParseDiagnostic> diagnostics;

    bool ok() const { return circuit.has_value(); }
    std::size_t error_count() const {
        std::size_t n = 0;
        for (const auto& d : diagnostics)
            if (d.severity == Severity::Error) ++n;
        return n;
    }
};

namespace qasm_detail {

enum class TokKind { Ident, Number, String, Symbol, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    int line = 1;
    int col = 1;
};

inline std::vector<Token> tokenize(std::string_view src, std::vector<ParseDiagnostic>& diags) {
    std::vector<Token> toks;
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (i < src.size() && src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        char ch = src[i];
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            advance(1);
            continue;
        }
        if (ch == '/' && i + 1 < src.size() && src[i + 1] == '/') {
            while (i < src.size() && src[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        bool have = true;
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::size_t j = i;
            while (j < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                ++j;
            t.kind = TokKind::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(ch)) ||
                   (ch == '.' && i + 1 < src.size() &&
                    std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) ||
                                      src[j] == '.'))
                ++j;
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    ++k;
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k])))
                        ++k;
                    j = k;
                }
            }
            t.kind = TokKind::Number;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (ch == '"') {
            std::size_t j = i + 1;
            while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
            if (j >= src.size() || src[j] != '"') {
                diags.push_back({Severity::Error, t.line, t.col, "unterminated string"});
                advance(j - i);
                have = false;
                continue;
            }
            t.kind = TokKind::String;
            t.text = std::string(src.substr(i + 1, j - i - 1));
            advance(j - i + 1);
        } else if (ch == '-' && i + 1 < src.size() && src[i + 1] == '>') {
            t.kind = TokKind::Symbol;
            t.text = "->";
            advance(2);
        } else if (std::string_view(";,[]()*/+-").find(ch) != std::string_view::npos) {
            t.kind = TokKind::Symbol;
            t.text = std::string(1, ch);
            advance(1);
        } else {
            diags.push_back({Severity::Error, line, col,
                             std::string("unexpected character '") + ch + "'"});
            advance(1);
            have = false;
        }
        if (have) toks.push_back(std::move(t));
    }
    Token end;
    end.kind = TokKind::End;
    end.line = line;
    end.col = col;
    toks.push_back(end);
    return toks;
}

struct GateSig {
    GateKind kind;
    int params;
    int qubits;
};

inline const GateSig* lookup_gate(const std::string& name) {
    static const std::pair<const char*, GateSig> table[] = {
        {"h", {GateKind::H, 0, 1}},      {"x", {GateKind::X, 0, 1}},
        {"sx", {GateKind::SX, 0, 1}},    {"rz", {GateKind::RZ, 1, 1}},
        {"rx", {GateKind::RX, 1, 1}},    {"u", {GateKind::U, 3, 1}},
        {"u3", {GateKind::U, 3, 1}},     {"cx", {GateKind::CX, 0, 2}},
        {"CX", {GateKind::CX, 0, 2}},    {"cp", {GateKind::CP, 1, 2}},
        {"cu1", {GateKind::CP, 1, 2}},   {"swap", {GateKind::Swap, 0, 2}},
    };
    for (const auto& [n, sig] : table)
        if (name == n) return &sig;
    return nullptr;
}

class Parser {
  public:
    explicit Parser(std::string_view src) {
        toks_ = tokenize(src, diags_);
    }

    ParseResult run() {
        parse_program();
        if (!seen_version_)
            diags_.push_back({Severity::Error, 1, 1, "missing OPENQASM 2.0 header"});
        ParseResult r;
        r.diagnostics = std::move(diags_);
        bool has_error = false;
        for (const auto& d : r.diagnostics)
            if (d.severity == Severity::Error) has_error = true;
        if (!has_error) r.circuit = std::move(circuit_);
        return r;
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    std::vector<ParseDiagnostic> diags_;
    Circuit circuit_;
    std::string qreg_name_, creg_name_;
    bool seen_qreg_ = false, seen_creg_ = false, seen_version_ = false;

    const Token& peek() const { return toks_[pos_]; }
    const Token& get() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == TokKind::End; }

    void error_here(const Token& t, std::string msg) {
        diags_.push_back({Severity::Error, t.line, t.col, std::move(msg)});
    }
    void warn_here(const Token& t, std::string msg) {
        diags_.push_back({Severity::Warning, t.line, t.col, std::move(msg)});
    }

    // After a bad statement, resync at the next ';' so parsing continues.
    void skip_statement() {
        while (!at_end()) {
            const Token& t = get();
            if (t.kind == TokKind::Symbol && t.text == ";") return;
        }
    }

    bool expect_symbol(const char* sym) {
        if (peek().kind == TokKind::Symbol && peek().text == sym) {
            get();
            return true;
        }
        error_here(peek(), std::string("expected '") + sym + "', got '" + peek().text + "'");
        return false;
    }

    void parse_program() {
        while (!at_end()) {
            if (!parse_statement()) skip_statement();
        }
    }

    bool parse_statement() {
        const Token& t = peek();
        if (t.kind != TokKind::Ident) {
            error_here(t, "expected statement, got '" + t.text + "'");
            return false;
        }
        if (t.text == "OPENQASM") return parse_version();
        if (t.text == "include") return parse_include();
        if (t.text == "qreg") return parse_qreg();
        if (t.text == "creg") return parse_creg();
        if (t.text == "measure") return parse_measure();
        if (t.text == "barrier") return parse_barrier();
        if (t.text == "gate" || t.text == "opaque" || t.text == "if" || t.text == "reset") {
            error_here(t, "unsupported statement '" + t.text + "'");
            return false;
        }
        return parse_gate();
    }

    bool parse_version() {
        const Token& kw = get();
        if (seen_version_) warn_here(kw, "duplicate OPENQASM header");
        seen_version_ = true;
        if (peek().kind != TokKind::Number) {
            error_here(peek(), "expected version number");
            return false;
        }
        Token ver = get();
        if (ver.text != "2.0") {
            error_here(ver, "unsupported version '" + ver.text + "' (only 2.0)");
            skip_statement();
            return true;
        }
        return expect_symbol(";");
    }

    bool parse_include() {
        get();
        if (peek().kind != TokKind::String) {
            error_here(peek(), "expected file name string after include");
            return false;
        }
        Token file = get();
        warn_here(file, "include \"" + file.text + "\" ignored");
        return expect_symbol(";");
    }

    bool parse_reg(bool quantum) {
        Token kw = get();
        if (peek().kind != TokKind::Ident) {
            error_here(peek(), "expected register name");
            return false;
        }
        Token name = get();
        if (!expect_symbol("[")) return false;
        if (peek().kind != TokKind::Number) {
            error_here(peek(), "expected register size");
            return false;
        }
        Token size = get();
        long n = 0;
        try {
            n = std::stol(size.text);
        } catch (...) {
            n = -1;
        }
        if (n <= 0 || size.text.find('.') != std::string::npos) {
            error_here(size, "register size must be a positive integer");
            return false;
        }
        if (!expect_symbol("]")) return false;
        if (!expect_symbol(";")) return false;
        if (quantum) {
            if (seen_qreg_) {
                error_here(kw, "multiple quantum registers are not supported");
                return true;
            }
            seen_qreg_ = true;
            qreg_name_ = name.text;
            circuit_.num_qubits = static_cast<std::uint32_t>(n);
        } else {
            if (seen_creg_) {
                error_here(kw, "multiple classical registers are not supported");
                return true;
            }
            seen_creg_ = true;
            creg_name_ = name.text;
            circuit_.num_clbits = static_cast<std::uint32_t>(n);
        }
        return true;
    }

    bool parse_qreg() { return parse_reg(true); }
    bool parse_creg() { return parse_reg(false); }

    // Register argument: name or name[index]. Returns (register ok, index or
    // -1 for the whole register).
    struct Arg {
        bool ok = false;
        bool quantum = true;
        long index = -1;  // -1: whole register
        Token where;
    };

    Arg parse_arg() {
        Arg a;
        if (peek().kind != TokKind::Ident) {
            error_here(peek(), "expected register argument");
            return a;
        }
        Token name = get();
        a.where = name;
        bool quantum;
        if (seen_qreg_ && name.text == qreg_name_) {
            quantum = true;
        } else if (seen_creg_ && name.text == creg_name_) {
            quantum = false;
        } else {
            error_here(name, "unknown register '" + name.text + "'");
            return a;
        }
        a.quantum = quantum;
        if (peek().kind == TokKind::Symbol && peek().text == "[") {
            get();
            if (peek().kind != TokKind::Number) {
                error_here(peek(), "expected index");
                return a;
            }
            Token idx = get();
            try {
                a.index = std::stol(idx.text);
            } catch (...) {
                a.index = -1;
            }
            if (a.index < 0 || idx.text.find('.') != std::string::npos) {
                error_here(idx, "index must be a non-negative integer");
                return a;
            }
            long limit = quantum ? circuit_.num_qubits : circuit_.num_clbits;
            if (a.index >= limit) {
                error_here(idx, "index out of range: " + name.text + "[" + idx.text +
                                    "] exceeds register size " + std::to_string(limit));
                return a;
            }
            if (!expect_symbol("]")) return a;
        }
        a.ok = true;
        return a;
    }

    // Angle grammar: [+|-] (number ['*' pi ['/' number]] | pi ['/' number]).
    bool parse_angle(double& out) {
        double sign = 1.0;
        while (peek().kind == TokKind::Symbol && (peek().text == "-" || peek().text == "+")) {
            if (get().text == "-") sign = -sign;
        }
        double value = 0.0;
        bool have_pi = false;
        double coeff = 1.0;
        if (peek().kind == TokKind::Number) {
            Token num = get();
            try {
                coeff = std::stod(num.text);
            } catch (...) {
                error_here(num, "bad numeric literal '" + num.text + "'");
                return false;
            }
            if (peek().kind == TokKind::Symbol && peek().text == "*") {
                get();
                if (!(peek().kind == TokKind::Ident && peek().text == "pi")) {
                    error_here(peek(), "expected 'pi' after '*'");
                    return false;
                }
                get();
                have_pi = true;
            }
        } else if (peek().kind == TokKind::Ident && peek().text == "pi") {
            get();
            have_pi = true;
        } else {
            error_here(peek(), "expected angle expression, got '" + peek().text + "'");
            return false;
        }
        value = have_pi ? coeff * 3.14159265358979323846 : coeff;
        if (peek().kind == TokKind::Symbol && peek().text == "/") {
            get();
            if (peek().kind != TokKind::Number) {
                error_here(peek(), "expected divisor after '/'");
                return false;
            }
            Token div = get();
            double d = 0;
            try {
                d = std::stod(div.text);
            } catch (...) {
                d = 0;
            }
            if (d == 0) {
                error_here(div, "division by zero in angle");
                return false;
            }
            value /= d;
        }
        out = sign * value;
        return true;
    }

    bool require_qreg(const Token& t) {
        if (!seen_qreg_) {
            error_here(t, "statement before qreg declaration");
            return false;
        }
        return true;
    }

    bool parse_measure() {
        Token kw = get();
        if (!require_qreg(kw)) return false;
        Arg q = parse_arg();
        if (!q.ok) return false;
        if (!q.quantum) {
            error_here(q.where, "measure source must be a qubit");
            return false;
        }
        if (!expect_symbol("->")) return false;
        Arg c = parse_arg();
        if (!c.ok) return false;
        if (c.quantum) {
            error_here(c.where, "measure target must be a classical bit");
            return false;
        }
        if (!expect_symbol(";")) return false;
        if (q.index >= 0 && c.index >= 0) {
            circuit_.measure(static_cast<std::uint32_t>(q.index),
                             static_cast<std::uint32_t>(c.index));
        } else if (q.index < 0 && c.index < 0) {
            if (circuit_.num_clbits < circuit_.num_qubits) {
                error_here(kw, "whole-register measure needs creg at least as large as qreg");
                return true;
            }
            for (std::uint32_t i = 0; i < circuit_.num_qubits; ++i) circuit_.measure(i, i);
        } else {
            error_here(kw, "measure operands must both be indexed or both whole registers");
        }
        return true;
    }

    bool parse_barrier() {
        Token kw = get();
        if (!require_qreg(kw)) return false;
        std::vector<std::uint32_t> qubits;
        while (true) {
            Arg a = parse_arg();
            if (!a.ok) return false;
            if (!a.quantum) {
                error_here(a.where, "barrier argument must be a qubit");
                return false;
            }
            if (a.index < 0) {
                for (std::uint32_t i = 0; i < circuit_.num_qubits; ++i) qubits.push_back(i);
            } else {
                qubits.push_back(static_cast<std::uint32_t>(a.index));
            }
            if (peek().kind == TokKind::Symbol && peek().text == ",") {
                get();
                continue;
            }
            break;
        }
        if (!expect_symbol(";")) return false;
        std::sort(qubits.begin(), qubits.end());
        qubits.erase(std::unique(qubits.begin(), qubits.end()), qubits.end());
        try {
            circuit_.barrier(std::move(qubits));
        } catch (const Error& e) {
            error_here(kw, e.what());
        }
        return true;
    }

    bool parse_gate() {
        Token name = get();
        const GateSig* sig = lookup_gate(name.text);
        if (!sig) {
            error_here(name, "unknown gate '" + name.text + "'");
            return false;
        }
        if (!require_qreg(name)) return false;
        std::array<double, 3> params{};
        if (sig->params > 0) {
            if (!expect_symbol("(")) return false;
            for (int i = 0; i < sig->params; ++i) {
                if (i > 0 && !expect_symbol(",")) return false;
                if (!parse_angle(params[i])) return false;
            }
            if (!expect_symbol(")")) return false;
        }
        std::vector<Arg> args;
        for (int i = 0; i < sig->qubits; ++i) {
            if (i > 0 && !expect_symbol(",")) return false;
            Arg a = parse_arg();
            if (!a.ok) return false;
            if (!a.quantum) {
                error_here(a.where, "gate argument must be a qubit");
                return false;
            }
            args.push_back(a);
        }
        if (!expect_symbol(";")) return false;

        auto emit = [&](const std::vector<std::uint32_t>& qs) -> bool {
            Op op;
            op.kind = sig->kind;
            op.qubits = qs;
            op.params = params;
            try {
                circuit_.append(std::move(op));
            } catch (const Error& e) {
                error_here(name, e.what());
                return false;
            }
            return true;
        };

        bool broadcast = false;
        for (const auto& a : args)
            if (a.index < 0) broadcast = true;
        if (!broadcast) {
            std::vector<std::uint32_t> qs;
            for (const auto& a : args) qs.push_back(static_cast<std::uint32_t>(a.index));
            return emit(qs);
        }
        if (sig->qubits != 1) {
            error_here(name, "whole-register form is only supported for one-qubit gates");
            return true;
        }
        for (std::uint32_t q = 0; q < circuit_.num_qubits; ++q)
            if (!emit({q})) return true;
        return true;
    }
};

inline std::string format_angle(double a) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", a);
    return buf;
}

}  // namespace qasm_detail

inline ParseResult parse_qasm(std::string_view text) {
    qasm_detail::Parser p(text);
    return p.run();
}

inline std::string serialize_qasm(const Circuit& c) {
    std::ostringstream os;
    os << "OPENQASM 2.0;\n";
    os << "qreg q[" << c.num_qubits << "];\n";
    if (c.num_clbits > 0) os << "creg c[" << c.num_clbits << "];\n";
    for (const auto& op : c.ops) {
        switch (op.kind) {
            case GateKind::Measure:
                os << "measure q[" << op.qubits[0] << "] -> c[" << op.clbit << "];\n";
                break;
            case GateKind::Barrier: {
                os << "barrier ";
                for (std::size_t i = 0; i < op.qubits.size(); ++i) {
                    if (i) os << ",";
                    os << "q[" << op.qubits[i] << "]";
                }
                os << ";\n";
                break;
            }
            default: {
                os << gate_name(op.kind);
                int np = param_count(op.kind);
                if (np > 0) {
                    os << "(";
                    for (int i = 0; i < np; ++i) {
                        if (i) os << ",";
                        os << qasm_detail::format_angle(op.params[i]);
                    }
                    os << ")";
                }
                os << " ";
                for (std::size_t i = 0; i < op.qubits.size(); ++i) {
                    if (i) os << ",";
                    os << "q[" << op.qubits[i] << "]";
                }
                os << ";\n";
            }
        }
    }
    return os.str();
}

}  // namespace qabench
