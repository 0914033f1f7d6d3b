#include "ldem/autodiff.hpp"

#include <cassert>
#include <numeric>

namespace ldem::ad {

Var Tape::variable(double value) { return commit(value); }

Var Tape::commit(double value) {
    values_.push_back(value);
    edge_end_.push_back(static_cast<std::uint32_t>(edge_parent_.size()));
    return Var{this, static_cast<int>(values_.size() - 1)};
}

std::vector<double> Tape::backward(Var root) const {
    assert(root.tape == this);
    std::vector<double> adj(values_.size(), 0.0);
    adj[static_cast<std::size_t>(root.id)] = 1.0;
    for (int i = root.id; i >= 0; --i) {
        const double a = adj[static_cast<std::size_t>(i)];
        if (a == 0.0) continue;
        const std::uint32_t begin = i == 0 ? 0u : edge_end_[static_cast<std::size_t>(i) - 1];
        const std::uint32_t end = edge_end_[static_cast<std::size_t>(i)];
        for (std::uint32_t e = begin; e < end; ++e) adj[static_cast<std::size_t>(edge_parent_[e])] += edge_partial_[e] * a;
    }
    return adj;
}

std::vector<double> Tape::gradient(Var root, std::span<const Var> leaves) const {
    const auto adj = backward(root);
    std::vector<double> g;
    g.reserve(leaves.size());
    for (const auto& v : leaves) g.push_back(adj[static_cast<std::size_t>(v.id)]);
    return g;
}

void Tape::clear() {
    values_.clear();
    edge_end_.clear();
    edge_parent_.clear();
    edge_partial_.clear();
}

void Tape::reserve(std::size_t nodes, std::size_t edges) {
    values_.reserve(nodes);
    edge_end_.reserve(nodes);
    edge_parent_.reserve(edges);
    edge_partial_.reserve(edges);
}

std::vector<Var> variables(Tape& tape, std::span<const double> vals) {
    std::vector<Var> out;
    out.reserve(vals.size());
    for (double v : vals) out.push_back(tape.variable(v));
    return out;
}

std::vector<double> values(std::span<const Var> vars) {
    std::vector<double> out;
    out.reserve(vars.size());
    for (const auto& v : vars) out.push_back(v.value());
    return out;
}

namespace {

Var unary(Var x, double value, double partial) {
    x.tape->add_edge(x.id, partial);
    return x.tape->commit(value);
}

Var binary(Var a, Var b, double value, double da, double db) {
    assert(a.tape == b.tape);
    a.tape->add_edge(a.id, da);
    a.tape->add_edge(b.id, db);
    return a.tape->commit(value);
}

}  // namespace

Var operator+(Var a, Var b) { return binary(a, b, a.value() + b.value(), 1.0, 1.0); }
Var operator-(Var a, Var b) { return binary(a, b, a.value() - b.value(), 1.0, -1.0); }
Var operator*(Var a, Var b) { return binary(a, b, a.value() * b.value(), b.value(), a.value()); }
Var operator/(Var a, Var b) {
    const double bv = b.value();
    const double q = a.value() / bv;
    return binary(a, b, q, 1.0 / bv, -q / bv);
}
Var operator-(Var a) { return unary(a, -a.value(), -1.0); }
Var operator+(Var a, double b) { return unary(a, a.value() + b, 1.0); }
Var operator+(double a, Var b) { return unary(b, a + b.value(), 1.0); }
Var operator-(Var a, double b) { return unary(a, a.value() - b, 1.0); }
Var operator-(double a, Var b) { return unary(b, a - b.value(), -1.0); }
Var operator*(Var a, double b) { return unary(a, a.value() * b, b); }
Var operator*(double a, Var b) { return unary(b, a * b.value(), a); }
Var operator/(Var a, double b) { return unary(a, a.value() / b, 1.0 / b); }
Var operator/(double a, Var b) {
    const double bv = b.value();
    return unary(b, a / bv, -a / (bv * bv));
}

Var abs(Var x) {
    const double v = x.value();
    return unary(x, std::abs(v), v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
}
Var square(Var x) {
    const double v = x.value();
    return unary(x, v * v, 2.0 * v);
}
Var sqrt(Var x) {
    const double r = std::sqrt(x.value());
    return unary(x, r, r > 0.0 ? 0.5 / r : 0.0);
}
Var exp(Var x) {
    const double e = std::exp(x.value());
    return unary(x, e, e);
}
Var log(Var x) { return unary(x, std::log(x.value()), 1.0 / x.value()); }
Var sigmoid(Var x) {
    const double s = sigmoid(x.value());
    return unary(x, s, s * (1.0 - s));
}
Var relu(Var x) {
    const double v = x.value();
    return unary(x, v > 0.0 ? v : 0.0, v > 0.0 ? 1.0 : 0.0);
}

double sum(std::span<const double> xs) { return std::accumulate(xs.begin(), xs.end(), 0.0); }

double mean(std::span<const double> xs) { return sum(xs) / static_cast<double>(xs.size()); }

double stddev(std::span<const double> xs, StdConvention conv) {
    const double m = mean(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    const double denom = conv == StdConvention::population ? static_cast<double>(xs.size())
                                                           : static_cast<double>(xs.size()) - 1.0;
    return std::sqrt(ss / denom);
}

Var sum(std::span<const Var> xs) {
    assert(!xs.empty());
    Tape* t = xs[0].tape;
    double s = 0.0;
    for (const auto& x : xs) {
        s += x.value();
        t->add_edge(x.id, 1.0);
    }
    return t->commit(s);
}

Var mean(std::span<const Var> xs) {
    assert(!xs.empty());
    Tape* t = xs[0].tape;
    const double inv = 1.0 / static_cast<double>(xs.size());
    double s = 0.0;
    for (const auto& x : xs) {
        s += x.value();
        t->add_edge(x.id, inv);
    }
    return t->commit(s * inv);
}

Var stddev(std::span<const Var> xs, StdConvention conv) {
    assert(!xs.empty());
    Tape* t = xs[0].tape;
    const auto n = static_cast<double>(xs.size());
    double m = 0.0;
    for (const auto& x : xs) m += x.value();
    m /= n;
    double ss = 0.0;
    for (const auto& x : xs) ss += (x.value() - m) * (x.value() - m);
    const double denom = conv == StdConvention::population ? n : n - 1.0;
    const double s = std::sqrt(ss / denom);
    // d s / d x_i = (x_i - m) / (denom * s); the mean's own dependence cancels.
    const double scale = s > 0.0 ? 1.0 / (denom * s) : 0.0;
    for (const auto& x : xs) t->add_edge(x.id, (x.value() - m) * scale);
    return t->commit(s);
}

double dot(std::span<const double> w, std::span<const double> x) {
    assert(w.size() == x.size());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
}

Var dot(std::span<const Var> w, std::span<const double> x) {
    assert(w.size() == x.size() && !w.empty());
    Tape* t = w[0].tape;
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        s += w[i].value() * x[i];
        t->add_edge(w[i].id, x[i]);
    }
    return t->commit(s);
}

std::vector<double> matvec(std::span<const double> matrix, std::span<const double> x) {
    assert(!x.empty() && matrix.size() % x.size() == 0);
    const std::size_t rows = matrix.size() / x.size();
    std::vector<double> out(rows);
    for (std::size_t r = 0; r < rows; ++r) out[r] = dot(matrix.subspan(r * x.size(), x.size()), x);
    return out;
}

std::vector<Var> matvec(std::span<const Var> matrix, std::span<const Var> x) {
    assert(!x.empty() && matrix.size() % x.size() == 0);
    Tape* t = x[0].tape;
    const std::size_t cols = x.size();
    const std::size_t rows = matrix.size() / cols;
    std::vector<Var> out;
    out.reserve(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < cols; ++c) {
            const Var& a = matrix[r * cols + c];
            s += a.value() * x[c].value();
            t->add_edge(a.id, x[c].value());
            t->add_edge(x[c].id, a.value());
        }
        out.push_back(t->commit(s));
    }
    return out;
}

std::vector<double> conv1d(std::span<const double> in, std::span<const double> kernel) {
    const auto n = static_cast<long>(in.size());
    const auto k = static_cast<long>(kernel.size());
    std::vector<double> out(in.size(), 0.0);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < k; ++j) {
            const long src = i + j - k / 2;
            if (src >= 0 && src < n) out[static_cast<std::size_t>(i)] += kernel[j] * in[src];
        }
    return out;
}

std::vector<Var> conv1d(std::span<const Var> in, std::span<const Var> kernel) {
    assert(!in.empty() && !kernel.empty());
    Tape* t = in[0].tape;
    const auto n = static_cast<long>(in.size());
    const auto k = static_cast<long>(kernel.size());
    std::vector<Var> out;
    out.reserve(in.size());
    for (long i = 0; i < n; ++i) {
        double s = 0.0;
        for (long j = 0; j < k; ++j) {
            const long src = i + j - k / 2;
            if (src < 0 || src >= n) continue;
            s += kernel[j].value() * in[src].value();
            t->add_edge(kernel[j].id, in[src].value());
            t->add_edge(in[src].id, kernel[j].value());
        }
        out.push_back(t->commit(s));
    }
    return out;
}

double tri_area(double ax, double ay, double bx, double by, double cx, double cy) {
    return 0.5 * ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax));
}

Var tri_area(Var ax, Var ay, Var bx, Var by, Var cx, Var cy) {
    const double axv = ax.value(), ayv = ay.value(), bxv = bx.value(), byv = by.value(), cxv = cx.value(),
                 cyv = cy.value();
    Tape* t = ax.tape;
    t->add_edge(ax.id, 0.5 * (byv - cyv));
    t->add_edge(ay.id, 0.5 * (cxv - bxv));
    t->add_edge(bx.id, 0.5 * (cyv - ayv));
    t->add_edge(by.id, -0.5 * (cxv - axv));
    t->add_edge(cx.id, -0.5 * (byv - ayv));
    t->add_edge(cy.id, 0.5 * (bxv - axv));
    return t->commit(tri_area(axv, ayv, bxv, byv, cxv, cyv));
}

namespace {

struct TetTerms {
    double volume;
    std::array<double, 12> grad;
};

TetTerms tet_terms(const std::array<double, 12>& p) {
    const double ux = p[3] - p[0], uy = p[4] - p[1], uz = p[5] - p[2];
    const double vx = p[6] - p[0], vy = p[7] - p[1], vz = p[8] - p[2];
    const double wx = p[9] - p[0], wy = p[10] - p[1], wz = p[11] - p[2];
    // Cofactors: dV/db = (v x w)/6, dV/dc = (w x u)/6, dV/dd = (u x v)/6.
    const double vw0 = vy * wz - vz * wy, vw1 = vz * wx - vx * wz, vw2 = vx * wy - vy * wx;
    const double wu0 = wy * uz - wz * uy, wu1 = wz * ux - wx * uz, wu2 = wx * uy - wy * ux;
    const double uv0 = uy * vz - uz * vy, uv1 = uz * vx - ux * vz, uv2 = ux * vy - uy * vx;
    TetTerms r;
    r.volume = (ux * vw0 + uy * vw1 + uz * vw2) / 6.0;
    const double s = 1.0 / 6.0;
    r.grad = {-(vw0 + wu0 + uv0) * s, -(vw1 + wu1 + uv1) * s, -(vw2 + wu2 + uv2) * s,
              vw0 * s, vw1 * s, vw2 * s, wu0 * s, wu1 * s, wu2 * s, uv0 * s, uv1 * s, uv2 * s};
    return r;
}

}  // namespace

double tet_volume(std::span<const double, 12> p) {
    std::array<double, 12> a;
    std::copy(p.begin(), p.end(), a.begin());
    return tet_terms(a).volume;
}

Var tet_volume(std::span<const Var, 12> p) {
    std::array<double, 12> a;
    for (std::size_t i = 0; i < 12; ++i) a[i] = p[i].value();
    const auto terms = tet_terms(a);
    Tape* t = p[0].tape;
    for (std::size_t i = 0; i < 12; ++i) t->add_edge(p[i].id, terms.grad[i]);
    return t->commit(terms.volume);
}

}  // namespace ldem::ad
