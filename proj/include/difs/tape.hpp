#pragma once
// Reverse-mode autodiff on a scalar tape.
//
// The operation set is deliberately small: arithmetic, sqrt, exp, min
// (gradient follows the argmin, ties to the first operand), clamp (zero
// subgradient outside [lo,hi], interior value on the boundary), and
// bilinear image sampling.  Recording is append-only; backward() walks the
// tape once in reverse, so gradients are deterministic for a fixed input.

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

namespace difs::ad {

class Tape;

struct Var {
    Tape* tape = nullptr;
    int32_t idx = -1;
    double v = 0.0;

    Var() = default;
    Var(Tape& t, int32_t i, double value) : tape(&t), idx(i), v(value) {}
};

class Tape {
public:
    // one input edge of a node: d(node)/d(parent) = w
    struct Edge {
        int32_t parent;
        double w;
    };

    int32_t leaf(double v) {
        starts_.push_back(static_cast<int32_t>(edges_.size()));
        vals_.push_back(v);
        return static_cast<int32_t>(vals_.size()) - 1;
    }

    Var var(double v) { return Var(*this, leaf(v), v); }

    int32_t node1(double v, int32_t p, double w) {
        starts_.push_back(static_cast<int32_t>(edges_.size()));
        edges_.push_back({p, w});
        vals_.push_back(v);
        return static_cast<int32_t>(vals_.size()) - 1;
    }

    int32_t node2(double v, int32_t p0, double w0, int32_t p1, double w1) {
        starts_.push_back(static_cast<int32_t>(edges_.size()));
        edges_.push_back({p0, w0});
        edges_.push_back({p1, w1});
        vals_.push_back(v);
        return static_cast<int32_t>(vals_.size()) - 1;
    }

    // n-ary node; `edges` lists every parent with its partial
    int32_t node_n(double v, const std::vector<Edge>& edges) {
        starts_.push_back(static_cast<int32_t>(edges_.size()));
        edges_.insert(edges_.end(), edges.begin(), edges.end());
        vals_.push_back(v);
        return static_cast<int32_t>(vals_.size()) - 1;
    }

    double value(int32_t i) const { return vals_[i]; }
    size_t size() const { return vals_.size(); }

    // adjoints of every node given d(root)/d(root) = 1
    std::vector<double> backward(int32_t root) const {
        std::vector<double> adj(vals_.size(), 0.0);
        if (root < 0) return adj;
        adj[root] = 1.0;
        for (int32_t i = root; i >= 0; --i) {
            const double a = adj[i];
            if (a == 0.0) continue;
            const int32_t e0 = starts_[i];
            const int32_t e1 = (i + 1 < static_cast<int32_t>(starts_.size()))
                                   ? starts_[i + 1]
                                   : static_cast<int32_t>(edges_.size());
            for (int32_t e = e0; e < e1; ++e)
                adj[edges_[e].parent] += a * edges_[e].w;
        }
        return adj;
    }

private:
    std::vector<double> vals_;
    std::vector<int32_t> starts_; // starts_[i] = first edge of node i
    std::vector<Edge> edges_;
};

// ---- operators ----------------------------------------------------------

inline Var operator+(const Var& a, const Var& b) {
    assert(a.tape == b.tape);
    Tape& t = *a.tape;
    return Var(t, t.node2(a.v + b.v, a.idx, 1.0, b.idx, 1.0), a.v + b.v);
}
inline Var operator+(const Var& a, double c) {
    Tape& t = *a.tape;
    return Var(t, t.node1(a.v + c, a.idx, 1.0), a.v + c);
}
inline Var operator+(double c, const Var& a) { return a + c; }

inline Var operator-(const Var& a, const Var& b) {
    assert(a.tape == b.tape);
    Tape& t = *a.tape;
    return Var(t, t.node2(a.v - b.v, a.idx, 1.0, b.idx, -1.0), a.v - b.v);
}
inline Var operator-(const Var& a, double c) {
    Tape& t = *a.tape;
    return Var(t, t.node1(a.v - c, a.idx, 1.0), a.v - c);
}
inline Var operator-(double c, const Var& a) {
    Tape& t = *a.tape;
    return Var(t, t.node1(c - a.v, a.idx, -1.0), c - a.v);
}
inline Var operator-(const Var& a) { return 0.0 - a; }

inline Var operator*(const Var& a, const Var& b) {
    assert(a.tape == b.tape);
    Tape& t = *a.tape;
    return Var(t, t.node2(a.v * b.v, a.idx, b.v, b.idx, a.v), a.v * b.v);
}
inline Var operator*(const Var& a, double c) {
    Tape& t = *a.tape;
    return Var(t, t.node1(a.v * c, a.idx, c), a.v * c);
}
inline Var operator*(double c, const Var& a) { return a * c; }

inline Var operator/(const Var& a, const Var& b) {
    assert(a.tape == b.tape);
    Tape& t = *a.tape;
    const double r = a.v / b.v;
    return Var(t, t.node2(r, a.idx, 1.0 / b.v, b.idx, -r / b.v), r);
}
inline Var operator/(const Var& a, double c) { return a * (1.0 / c); }
inline Var operator/(double c, const Var& b) {
    Tape& t = *b.tape;
    const double r = c / b.v;
    return Var(t, t.node1(r, b.idx, -r / b.v), r);
}

inline Var sqrt(const Var& a) {
    Tape& t = *a.tape;
    const double s = std::sqrt(a.v);
    return Var(t, t.node1(s, a.idx, 0.5 / s), s);
}

inline Var exp(const Var& a) {
    Tape& t = *a.tape;
    const double e = std::exp(a.v);
    return Var(t, t.node1(e, a.idx, e), e);
}

// gradient flows through the smaller operand; ties pick `a` (first/lowest)
inline Var min(const Var& a, const Var& b) {
    assert(a.tape == b.tape);
    Tape& t = *a.tape;
    if (a.v <= b.v)
        return Var(t, t.node1(a.v, a.idx, 1.0), a.v);
    return Var(t, t.node1(b.v, b.idx, 1.0), b.v);
}

// subgradient 0 outside [lo,hi]; boundary uses the interior value (1)
inline Var clamp(const Var& a, double lo, double hi) {
    Tape& t = *a.tape;
    if (a.v < lo) return Var(t, t.node1(lo, a.idx, 0.0), lo);
    if (a.v > hi) return Var(t, t.node1(hi, a.idx, 0.0), hi);
    return Var(t, t.node1(a.v, a.idx, 1.0), a.v);
}

inline double value_of(const Var& a) { return a.v; }
inline double value_of(double a) { return a; }

} // namespace difs::ad
