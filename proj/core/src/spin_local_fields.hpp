#pragma once

#include <cstdint>
#include <vector>

#include "gibbslab/environment.hpp"
#include "gibbslab/model.hpp"

namespace gibbslab::detail {

// Incremental energy bookkeeping for the spin mixture model. Tracks the
// current configuration and answers "what does flipping spin k cost" from
// cached pair fields (degree 2) and collapsed triple matrices (degree 3).
// Tuples with a repeated index are handled by parity: an index appearing an
// even number of times never flips, an odd number always does.
class SpinFieldState {
  public:
    SpinFieldState(const ModelSpec& model, const Environment& env);

    int n() const { return n_; }
    double energy() const { return energy_; }
    std::uint64_t bits() const { return bits_; }

    double flip_delta(int k) const;
    double apply(int k);  // flips spin k, returns the energy change
    void set_bits(std::uint64_t bits);

  private:
    int n_ = 0;
    bool has2_ = false, has3_ = false;
    double energy_ = 0.0;
    std::uint64_t bits_ = 0;
    std::vector<double> s_;        // +-1 per spin
    std::vector<double> a2_;       // pair flip matrix, diag zero
    std::vector<double> hfield2_;  // a2 . s
    std::vector<double> b3_;       // triple flip matrices, k-touching entries zero
    std::vector<double> d3_;       // pure-diagonal triples

    std::size_t i2(int a, int b) const { return static_cast<std::size_t>(a + n_ * b); }
    std::size_t i3(int a, int b, int c) const {
        return static_cast<std::size_t>(a + n_ * (b + n_ * c));
    }
};

}  // namespace gibbslab::detail
