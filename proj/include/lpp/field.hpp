#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <utility>

#include "lpp/envlaw.hpp"
#include "lpp/rng.hpp"

namespace lpp {

// Quenched weight field: weight_at(i,j) = F_j^{-1}(u(i,j)) with u the
// shared counter-based uniform field.  Two fields built over the same
// uniforms realize the monotone quantile coupling.
class WeightField {
  public:
    WeightField(std::shared_ptr<const Environment> env, UniformField uniforms)
        : env_(std::move(env)), uniforms_(uniforms) {
        if (!env_ || env_->rows.empty())
            throw std::invalid_argument("WeightField: empty environment");
    }

    WeightField(Environment env, UniformField uniforms)
        : WeightField(std::make_shared<Environment>(std::move(env)), uniforms) {}

    const Environment& environment() const { return *env_; }
    const UniformField& uniforms() const { return uniforms_; }
    std::size_t rows() const { return env_->rows.size(); }

    double uniform_at(std::int64_t i, std::int64_t j) const {
        return uniforms_.at(i, j);
    }

    double weight_at(std::int64_t i, std::int64_t j) const {
        if (j < 0 || static_cast<std::size_t>(j) >= env_->rows.size())
            throw std::out_of_range("WeightField: row index outside environment");
        return env_->rows[static_cast<std::size_t>(j)].quantile(uniforms_.at(i, j));
    }

    // Unchecked accessor for inner DP loops.
    double operator()(std::int64_t i, std::int64_t j) const {
        return env_->rows[static_cast<std::size_t>(j)].quantile(uniforms_.at(i, j));
    }

  private:
    std::shared_ptr<const Environment> env_;
    UniformField uniforms_;
};

inline std::pair<WeightField, WeightField> coupled_pair(
    std::shared_ptr<const Environment> env_f,
    std::shared_ptr<const Environment> env_g, UniformField uniforms) {
    if (!env_f || !env_g || env_f->rows.size() != env_g->rows.size())
        throw std::invalid_argument("coupled_pair: environment length mismatch");
    return {WeightField(std::move(env_f), uniforms),
            WeightField(std::move(env_g), uniforms)};
}

}  // namespace lpp
