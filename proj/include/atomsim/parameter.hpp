#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rng.hpp"

namespace atomsim {

// Named physical quantity with a default value and optional shot-to-shot
// Gaussian spread. std_dev = 0 means deterministic.
struct Parameter {
    std::string name;
    double default_value = 0.0;
    double std_dev = 0.0;

    Parameter() = default;
    Parameter(std::string n, double def, double std = 0.0)
        : name(std::move(n)), default_value(def), std_dev(std) {
        if (std_dev < 0) throw std::invalid_argument("parameter '" + name + "': negative std");
    }
};

// Reference to a parameter declared elsewhere (scenario files use
// "$name"); carries no default of its own.
struct ParamRef {
    std::string name;
};

struct Expr;

// A number, a Parameter, a reference, or an arithmetic expression over
// them. Values appear wherever the model accepts a physical quantity and
// are resolved to numbers per shot.
class Value {
  public:
    Value() : v_(0.0) {}
    Value(double x) : v_(x) {}
    Value(int x) : v_(static_cast<double>(x)) {}
    Value(Parameter p) : v_(std::move(p)) {}
    Value(ParamRef r) : v_(std::move(r)) {}
    Value(std::shared_ptr<const Expr> e) : v_(std::move(e)) {}

    const std::variant<double, Parameter, ParamRef, std::shared_ptr<const Expr>>& raw() const { return v_; }

    bool is_number() const { return std::holds_alternative<double>(v_); }
    double number() const { return std::get<double>(v_); }

    // true when the resolved value can differ between shots
    bool stochastic() const;

    friend Value operator+(const Value& a, const Value& b);
    friend Value operator-(const Value& a, const Value& b);
    friend Value operator*(const Value& a, const Value& b);
    friend Value operator/(const Value& a, const Value& b);
    Value operator-() const;

  private:
    std::variant<double, Parameter, ParamRef, std::shared_ptr<const Expr>> v_;
};

struct Expr {
    enum class Op { Add, Sub, Mul, Div, Neg, Fn };
    Op op;
    Value a;
    Value b;
    double (*fn)(double) = nullptr;
    std::string fn_name;
};

inline Value make_expr(Expr::Op op, Value a, Value b) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->a = std::move(a);
    e->b = std::move(b);
    return Value(std::shared_ptr<const Expr>(std::move(e)));
}

inline Value operator+(const Value& a, const Value& b) {
    if (a.is_number() && b.is_number()) return a.number() + b.number();
    return make_expr(Expr::Op::Add, a, b);
}
inline Value operator-(const Value& a, const Value& b) {
    if (a.is_number() && b.is_number()) return a.number() - b.number();
    return make_expr(Expr::Op::Sub, a, b);
}
inline Value operator*(const Value& a, const Value& b) {
    if (a.is_number() && b.is_number()) return a.number() * b.number();
    return make_expr(Expr::Op::Mul, a, b);
}
inline Value operator/(const Value& a, const Value& b) {
    if (a.is_number() && b.is_number()) return a.number() / b.number();
    return make_expr(Expr::Op::Div, a, b);
}
inline Value Value::operator-() const {
    if (is_number()) return -number();
    return make_expr(Expr::Op::Neg, *this, Value(0.0));
}

inline Value apply_fn(double (*fn)(double), std::string name, Value a) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Fn;
    e->a = std::move(a);
    e->fn = fn;
    e->fn_name = std::move(name);
    return Value(std::shared_ptr<const Expr>(std::move(e)));
}
inline Value vsin(Value a) { return apply_fn(std::sin, "sin", std::move(a)); }
inline Value vcos(Value a) { return apply_fn(std::cos, "cos", std::move(a)); }
inline Value vexp(Value a) { return apply_fn(std::exp, "exp", std::move(a)); }
inline Value vsqrt(Value a) { return apply_fn(std::sqrt, "sqrt", std::move(a)); }
inline Value vabs(Value a) { return apply_fn(std::fabs, "abs", std::move(a)); }

// Per-shot resolution state. Overrides take precedence; otherwise a
// parameter with std > 0 is sampled once per shot (repeated references
// to the same name share the draw) and deterministic parameters take
// their defaults.
struct ResolveContext {
    const std::map<std::string, double>* overrides = nullptr;
    const std::map<std::string, Parameter>* declared = nullptr;  // for ParamRef lookups
    std::mt19937_64* rng = nullptr;
    std::map<std::string, double> draws;

    double resolve_parameter(const Parameter& p) {
        if (overrides) {
            auto it = overrides->find(p.name);
            if (it != overrides->end()) return it->second;
        }
        if (p.std_dev <= 0.0) return p.default_value;
        auto it = draws.find(p.name);
        if (it != draws.end()) return it->second;
        if (!rng) throw std::runtime_error("parameter '" + p.name + "': stochastic resolution requires an rng");
        const double x = p.default_value + p.std_dev * gaussian(*rng);
        draws.emplace(p.name, x);
        return x;
    }

    double resolve_ref(const ParamRef& r) {
        if (overrides) {
            auto it = overrides->find(r.name);
            if (it != overrides->end()) return it->second;
        }
        if (declared) {
            auto it = declared->find(r.name);
            if (it != declared->end()) return resolve_parameter(it->second);
        }
        throw std::runtime_error("unknown parameter '" + r.name + "' (no default and no override)");
    }
};

inline double resolve(const Value& v, ResolveContext& ctx) {
    struct Visitor {
        ResolveContext& ctx;
        double operator()(double x) const { return x; }
        double operator()(const Parameter& p) const { return ctx.resolve_parameter(p); }
        double operator()(const ParamRef& r) const { return ctx.resolve_ref(r); }
        double operator()(const std::shared_ptr<const Expr>& e) const {
            switch (e->op) {
                case Expr::Op::Add: return resolve(e->a, ctx) + resolve(e->b, ctx);
                case Expr::Op::Sub: return resolve(e->a, ctx) - resolve(e->b, ctx);
                case Expr::Op::Mul: return resolve(e->a, ctx) * resolve(e->b, ctx);
                case Expr::Op::Div: return resolve(e->a, ctx) / resolve(e->b, ctx);
                case Expr::Op::Neg: return -resolve(e->a, ctx);
                case Expr::Op::Fn: return e->fn(resolve(e->a, ctx));
            }
            throw std::logic_error("unreachable");
        }
    };
    return std::visit(Visitor{ctx}, v.raw());
}

inline bool Value::stochastic() const {
    struct Visitor {
        bool operator()(double) const { return false; }
        bool operator()(const Parameter& p) const { return p.std_dev > 0.0; }
        bool operator()(const ParamRef&) const { return true; }  // unknown until resolution
        bool operator()(const std::shared_ptr<const Expr>& e) const {
            if (e->op == Expr::Op::Fn || e->op == Expr::Op::Neg) return e->a.stochastic();
            return e->a.stochastic() || e->b.stochastic();
        }
    };
    return std::visit(Visitor{}, v_);
}

} // namespace atomsim
