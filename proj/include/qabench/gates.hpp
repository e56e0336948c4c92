#pragma once

// Small dense matrices for one-qubit gates plus the ZXZXZ resynthesis used
// when collapsing runs of one-qubit gates into at most RZ-SX-RZ-SX-RZ.

#include <array>
#include <cmath>
#include <complex>

#include "qabench/circuit.hpp"

namespace qabench {

using cplx = std::complex<double>;

constexpr double kPi = 3.14159265358979323846;

// Row-major 2x2: m[0]=u00 m[1]=u01 m[2]=u10 m[3]=u11.
struct Mat2 {
    std::array<cplx, 4> m{cplx(1), cplx(0), cplx(0), cplx(1)};

    static Mat2 identity() { return {}; }
};

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    r.m[0] = a.m[0] * b.m[0] + a.m[1] * b.m[2];
    r.m[1] = a.m[0] * b.m[1] + a.m[1] * b.m[3];
    r.m[2] = a.m[2] * b.m[0] + a.m[3] * b.m[2];
    r.m[3] = a.m[2] * b.m[1] + a.m[3] * b.m[3];
    return r;
}

inline Mat2 gate_unitary_1q(GateKind k, const std::array<double, 3>& p) {
    Mat2 r;
    switch (k) {
        case GateKind::H: {
            double s = 1.0 / std::sqrt(2.0);
            r.m = {cplx(s), cplx(s), cplx(s), cplx(-s)};
            break;
        }
        case GateKind::X:
            r.m = {cplx(0), cplx(1), cplx(1), cplx(0)};
            break;
        case GateKind::SX:
            r.m = {cplx(0.5, 0.5), cplx(0.5, -0.5), cplx(0.5, -0.5), cplx(0.5, 0.5)};
            break;
        case GateKind::RZ: {
            double a = p[0];
            r.m = {std::polar(1.0, -a / 2), cplx(0), cplx(0), std::polar(1.0, a / 2)};
            break;
        }
        case GateKind::RX: {
            double c = std::cos(p[0] / 2), s = std::sin(p[0] / 2);
            r.m = {cplx(c), cplx(0, -s), cplx(0, -s), cplx(c)};
            break;
        }
        case GateKind::U: {
            double th = p[0], ph = p[1], la = p[2];
            double c = std::cos(th / 2), s = std::sin(th / 2);
            r.m = {cplx(c), -std::polar(s, la), std::polar(s, ph), std::polar(c, la + ph)};
            break;
        }
        default:
            throw Error(std::string("gate_unitary_1q: not a one-qubit unitary: ") + gate_name(k));
    }
    return r;
}

inline double wrap_angle(double a) {
    a = std::fmod(a, 2 * kPi);
    if (a <= -kPi) a += 2 * kPi;
    if (a > kPi) a -= 2 * kPi;
    return a;
}

constexpr double kAngleTol = 1e-9;

inline bool is_identity_up_to_phase(const Mat2& u, double tol = kAngleTol) {
    if (std::abs(u.m[1]) > tol || std::abs(u.m[2]) > tol) return false;
    return std::abs(u.m[0] - u.m[3]) <= tol;
}

inline bool is_diagonal(const Mat2& u, double tol = kAngleTol) {
    return std::abs(u.m[1]) <= tol && std::abs(u.m[2]) <= tol;
}

// Proportional to X, the only anti-diagonal form that commutes through a
// CX target: off-diagonal entries must match.
inline bool is_x_like(const Mat2& u, double tol = kAngleTol) {
    if (std::abs(u.m[0]) > tol || std::abs(u.m[3]) > tol) return false;
    return std::abs(u.m[1] - u.m[2]) <= tol;
}

// Emit ops computing u (up to global phase) onto qubit q using RZ/SX/X.
// Cases by polar angle theta = 2*atan2(|u10|,|u00|):
//   theta ~ 0   -> single RZ (or nothing),
//   theta ~ pi  -> X then RZ,
//   theta ~ pi/2-> RZ SX RZ,
//   otherwise   -> RZ SX RZ SX RZ.
inline void synthesize_1q(const Mat2& u, std::uint32_t q, std::vector<Op>& out) {
    auto push_rz = [&](double a) {
        a = wrap_angle(a);
        if (std::abs(a) <= kAngleTol) return;
        Op op;
        op.kind = GateKind::RZ;
        op.qubits = {q};
        op.params = {a, 0, 0};
        out.push_back(std::move(op));
    };
    auto push_plain = [&](GateKind k) {
        Op op;
        op.kind = k;
        op.qubits = {q};
        out.push_back(std::move(op));
    };

    double a00 = std::abs(u.m[0]), a10 = std::abs(u.m[2]);
    double theta = 2 * std::atan2(a10, a00);

    if (a10 <= kAngleTol) {
        push_rz(std::arg(u.m[3] / u.m[0]));
        return;
    }
    if (a00 <= kAngleTol) {
        double phi = std::arg(u.m[2] / (-u.m[1]));
        push_plain(GateKind::X);
        push_rz(phi + kPi);
        return;
    }
    double phi = std::arg(u.m[2] / u.m[0]);
    double lambda = std::arg(-u.m[1] / u.m[0]);
    if (std::abs(theta - kPi / 2) <= kAngleTol) {
        push_rz(lambda - kPi / 2);
        push_plain(GateKind::SX);
        push_rz(phi + kPi / 2);
        return;
    }
    push_rz(lambda);
    push_plain(GateKind::SX);
    push_rz(theta + kPi);
    push_plain(GateKind::SX);
    push_rz(phi + kPi);
}

}  // namespace qabench
