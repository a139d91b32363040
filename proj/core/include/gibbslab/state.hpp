#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace gibbslab {

enum class StateKind { Spins, Path };

// Canonical state encoding. Spin configurations are a bitmask (bit i set means
// sigma_i = +1) rendered as a bitstring, leftmost character = spin 0. Lattice
// paths are a sequence of unit-step codes rendered as direction letters.
// Step code 2a is +e_a, code 2a+1 is -e_a; letters per axis: RL, UD, FB.
class StateId {
  public:
    static StateId spins(std::uint64_t bits, int n);
    static StateId path(int dim, std::vector<std::uint8_t> steps);

    static StateId parse_spins(const std::string& text);
    static StateId parse_path(const std::string& text, int dim);

    StateKind kind() const { return kind_; }

    int spin_count() const { return n_; }
    std::uint64_t spin_bits() const { return bits_; }
    int spin(int i) const { return (bits_ >> i) & 1u ? +1 : -1; }

    int dim() const { return dim_; }
    const std::vector<std::uint8_t>& steps() const { return steps_; }

    std::string text() const;

    bool operator==(const StateId& other) const = default;

  private:
    StateId() = default;
    StateKind kind_ = StateKind::Spins;
    std::uint64_t bits_ = 0;
    int n_ = 0;
    int dim_ = 0;
    std::vector<std::uint8_t> steps_;
};

// Positions x_1 .. x_n visited after each step (origin excluded).
std::vector<std::array<int, 3>> path_sites(const StateId& state);

std::array<int, 3> step_vector(int dim, std::uint8_t code);

}  // namespace gibbslab
