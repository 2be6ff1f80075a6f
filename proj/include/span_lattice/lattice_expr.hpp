#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "span_lattice/errors.hpp"
#include "span_lattice/scalar.hpp"

namespace span_lattice {

namespace expr_detail {
// Free dispatch points so element overloads are found by ADL at
// instantiation, independent of header inclusion order.
template <class Elem>
Elem do_meet(const Elem& a, const Elem& b) {
  return meet(a, b);
}
template <class Elem>
Elem do_join(const Elem& a, const Elem& b) {
  return join(a, b);
}
template <class Elem>
Elem do_pos_part(const Elem& a) {
  return pos_part(a);
}
}  // namespace expr_detail

// Expression tree over generator slots with +, scalar·, ∧, ∨ and (·)^+.
// Scalars are stored as integer ratios so evaluation is exact in rational
// mode. Evaluable against any element type providing meet/join/pos_part,
// operator+ and scaling by its scalar.
class LatticeExpr {
 public:
  enum class Kind { generator, add, scale, meet, join, pos_part };

  static LatticeExpr generator(std::size_t index) {
    LatticeExpr e(Kind::generator);
    e.generator_ = index;
    return e;
  }
  static LatticeExpr add(LatticeExpr lhs, LatticeExpr rhs) {
    return binary(Kind::add, std::move(lhs), std::move(rhs));
  }
  static LatticeExpr meet(LatticeExpr lhs, LatticeExpr rhs) {
    return binary(Kind::meet, std::move(lhs), std::move(rhs));
  }
  static LatticeExpr join(LatticeExpr lhs, LatticeExpr rhs) {
    return binary(Kind::join, std::move(lhs), std::move(rhs));
  }
  static LatticeExpr pos_part(LatticeExpr child) {
    LatticeExpr e(Kind::pos_part);
    e.children_.push_back(std::move(child));
    return e;
  }
  static LatticeExpr scale(std::int64_t num, std::int64_t den, LatticeExpr child) {
    if (den == 0) throw ArgumentError("scale denominator may not be zero");
    LatticeExpr e(Kind::scale);
    e.num_ = num;
    e.den_ = den;
    e.children_.push_back(std::move(child));
    return e;
  }

  Kind kind() const { return kind_; }

  template <class Elem>
  Elem evaluate(std::span<const Elem> generators) const {
    using S = typename Elem::scalar_type;
    switch (kind_) {
      case Kind::generator:
        if (generator_ >= generators.size())
          throw ArgumentError("expression references an unknown generator");
        return generators[generator_];
      case Kind::add:
        return children_[0].evaluate(generators) + children_[1].evaluate(generators);
      case Kind::scale:
        return children_[0].evaluate(generators) *
               scalar_traits<S>::from_ratio(num_, den_);
      case Kind::meet:
        return expr_detail::do_meet(children_[0].evaluate(generators),
                                    children_[1].evaluate(generators));
      case Kind::join:
        return expr_detail::do_join(children_[0].evaluate(generators),
                                    children_[1].evaluate(generators));
      case Kind::pos_part:
        return expr_detail::do_pos_part(children_[0].evaluate(generators));
    }
    throw ArgumentError("malformed expression node");
  }

  template <class Elem>
  Elem evaluate(const std::vector<Elem>& generators) const {
    return evaluate(std::span<const Elem>(generators.data(), generators.size()));
  }

  // Uniform random tree of depth at most max_depth. Deterministic in the
  // engine state; scalars are small ratios so rational evaluation stays cheap.
  static LatticeExpr random(std::mt19937& rng, std::size_t generator_count, int max_depth) {
    if (generator_count == 0) throw ArgumentError("need at least one generator");
    std::uniform_int_distribution<std::size_t> pick_gen(0, generator_count - 1);
    if (max_depth <= 0) return generator(pick_gen(rng));
    std::uniform_int_distribution<int> pick_kind(0, 5);
    switch (pick_kind(rng)) {
      case 0:
        return generator(pick_gen(rng));
      case 1:
        return add(random(rng, generator_count, max_depth - 1),
                   random(rng, generator_count, max_depth - 1));
      case 2: {
        static constexpr std::pair<std::int64_t, std::int64_t> ratios[] = {
            {-2, 1}, {-1, 1}, {-1, 2}, {1, 3}, {1, 2}, {2, 3}, {1, 1}, {3, 2}, {2, 1}, {3, 1}};
        std::uniform_int_distribution<std::size_t> pick_ratio(0, std::size(ratios) - 1);
        auto [num, den] = ratios[pick_ratio(rng)];
        return scale(num, den, random(rng, generator_count, max_depth - 1));
      }
      case 3:
        return meet(random(rng, generator_count, max_depth - 1),
                    random(rng, generator_count, max_depth - 1));
      case 4:
        return join(random(rng, generator_count, max_depth - 1),
                    random(rng, generator_count, max_depth - 1));
      default:
        return pos_part(random(rng, generator_count, max_depth - 1));
    }
  }

  std::string to_string() const {
    switch (kind_) {
      case Kind::generator:
        return "g" + std::to_string(generator_);
      case Kind::add:
        return "(" + children_[0].to_string() + " + " + children_[1].to_string() + ")";
      case Kind::scale:
        return std::to_string(num_) + "/" + std::to_string(den_) + "*" +
               children_[0].to_string();
      case Kind::meet:
        return "(" + children_[0].to_string() + " ^ " + children_[1].to_string() + ")";
      case Kind::join:
        return "(" + children_[0].to_string() + " v " + children_[1].to_string() + ")";
      case Kind::pos_part:
        return "pos(" + children_[0].to_string() + ")";
    }
    return "?";
  }

 private:
  explicit LatticeExpr(Kind kind) : kind_(kind) {}

  static LatticeExpr binary(Kind kind, LatticeExpr lhs, LatticeExpr rhs) {
    LatticeExpr e(kind);
    e.children_.push_back(std::move(lhs));
    e.children_.push_back(std::move(rhs));
    return e;
  }

  Kind kind_;
  std::size_t generator_ = 0;
  std::int64_t num_ = 1;
  std::int64_t den_ = 1;
  std::vector<LatticeExpr> children_;
};

}  // namespace span_lattice
