#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gibbslab/state.hpp"
#include "gibbslab/walk.hpp"
#include "gibbslab/xi.hpp"

namespace gibbslab {

struct Environment;

enum class ModelKind { Rem, PSpin, Polymer };

std::string to_string(ModelKind kind);

// A Gaussian-field model: a state space, a feature map phi with
// sum_i phi_i(sigma)^2 = n for every state, and a reference law on states.
// The feature index spaces are dense integer ranges:
//   random-energy model  - the state index itself, 2^n features;
//   multi-body spins     - tuples (p, i_1..i_p) flattened row-major per p;
//   polymer              - (time, site) over the box |x|_inf <= n, n slices.
class ModelSpec {
  public:
    static ModelSpec rem(int n);
    static ModelSpec p_spin(int n, MixedXi xi);
    static ModelSpec polymer(int n, WalkKernel kernel,
                             std::optional<std::array<int, 3>> endpoint = std::nullopt);

    ModelKind kind() const { return kind_; }
    int n() const { return n_; }
    std::int64_t feature_count() const { return feature_count_; }

    const MixedXi& xi() const;
    const WalkKernel& kernel() const;
    const std::optional<std::array<int, 3>>& endpoint() const;
    LatticeBox box() const;  // polymer only

    std::int64_t polymer_feature_index(int time, const std::array<int, 3>& site) const;

    std::vector<double> feature_vector(const StateId& state) const;
    double hamiltonian(const Environment& env, const StateId& state) const;
    double overlap(const StateId& a, const StateId& b) const;
    double metric_rho(const StateId& a, const StateId& b) const;

    void validate_state(const StateId& state) const;  // throws ValidationError
    void validate_environment(const Environment& env) const;
    StateId parse_state(const std::string& text) const;

    // spin-model helper: overlap from the XOR popcount of two bitmasks
    double spin_overlap_from_bits(std::uint64_t a, std::uint64_t b) const;

  private:
    ModelSpec() = default;
    ModelKind kind_ = ModelKind::Rem;
    int n_ = 0;
    std::int64_t feature_count_ = 0;
    std::optional<MixedXi> xi_;
    std::optional<WalkKernel> kernel_;
    std::optional<std::array<int, 3>> endpoint_;
};

}  // namespace gibbslab
