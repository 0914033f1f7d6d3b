#pragma once

// Reverse-mode automatic differentiation on a Wengert tape.
//
// Every node stores its primal value and the local partial derivatives with
// respect to its operands. Nodes are appended in evaluation order, so the
// tape is a topological order by construction and the backward sweep is a
// single reverse pass.
//
// The free functions in this namespace are overloaded for both `double` and
// `Var`, which lets loss and model code be written once as templates and
// evaluated either plainly or on a tape.

#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <vector>

namespace ldem::ad {

class Tape;

struct Var {
    Tape* tape = nullptr;
    int id = -1;

    double value() const;
};

template <typename T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Var>;

enum class StdConvention { population, sample };

class Tape {
public:
    Tape() = default;
    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    Var variable(double value);
    Var constant(double value) { return variable(value); }

    // Low-level node construction: stage edges, then commit the node.
    void add_edge(int parent, double partial) {
        edge_parent_.push_back(parent);
        edge_partial_.push_back(partial);
    }
    Var commit(double value);

    double value(int id) const { return values_[static_cast<std::size_t>(id)]; }
    std::size_t size() const noexcept { return values_.size(); }

    // Adjoint of every node with respect to `root`.
    std::vector<double> backward(Var root) const;
    // Adjoints of a contiguous block of leaves, e.g. a parameter vector.
    std::vector<double> gradient(Var root, std::span<const Var> leaves) const;

    void clear();
    void reserve(std::size_t nodes, std::size_t edges);

private:
    std::vector<double> values_;
    std::vector<std::uint32_t> edge_end_;  // edges of node i: [edge_end_[i-1], edge_end_[i])
    std::vector<int> edge_parent_;
    std::vector<double> edge_partial_;
};

inline double Var::value() const { return tape->value(id); }

std::vector<Var> variables(Tape& tape, std::span<const double> values);
std::vector<double> values(std::span<const Var> vars);

// Arithmetic.
Var operator+(Var a, Var b);
Var operator-(Var a, Var b);
Var operator*(Var a, Var b);
Var operator/(Var a, Var b);
Var operator-(Var a);
Var operator+(Var a, double b);
Var operator+(double a, Var b);
Var operator-(Var a, double b);
Var operator-(double a, Var b);
Var operator*(Var a, double b);
Var operator*(double a, Var b);
Var operator/(Var a, double b);
Var operator/(double a, Var b);

// Elementwise primitives.
Var abs(Var x);  // subgradient 0 at x == 0
Var square(Var x);
Var sqrt(Var x);
Var exp(Var x);
Var log(Var x);
Var sigmoid(Var x);
Var relu(Var x);  // subgradient 0 at x == 0

inline double abs(double x) { return std::abs(x); }
inline double square(double x) { return x * x; }
inline double sqrt(double x) { return std::sqrt(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }
inline double relu(double x) { return x > 0.0 ? x : 0.0; }

// Reductions.
Var sum(std::span<const Var> xs);
Var mean(std::span<const Var> xs);
Var stddev(std::span<const Var> xs, StdConvention conv = StdConvention::population);
double sum(std::span<const double> xs);
double mean(std::span<const double> xs);
double stddev(std::span<const double> xs, StdConvention conv = StdConvention::population);

// Linear algebra. `matrix` is row-major with xs.size() columns.
Var dot(std::span<const Var> w, std::span<const double> x);
double dot(std::span<const double> w, std::span<const double> x);
std::vector<Var> matvec(std::span<const Var> matrix, std::span<const Var> x);
std::vector<double> matvec(std::span<const double> matrix, std::span<const double> x);

// Single-channel cross-correlation with same-length zero padding:
// out[i] = sum_t kernel[t] * in[i + t - K/2].
std::vector<Var> conv1d(std::span<const Var> in, std::span<const Var> kernel);
std::vector<double> conv1d(std::span<const double> in, std::span<const double> kernel);

// Fused signed measures (one tape node each).
Var tri_area(Var ax, Var ay, Var bx, Var by, Var cx, Var cy);
double tri_area(double ax, double ay, double bx, double by, double cx, double cy);
Var tet_volume(std::span<const Var, 12> p);
double tet_volume(std::span<const double, 12> p);

// A constant living on the same tape as `like` (or the plain value).
inline Var lift(const Var& like, double v) { return like.tape->constant(v); }
inline double lift(double, double v) { return v; }

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.value(); }

}  // namespace ldem::ad
