#include "gibbslab/state.hpp"

#include "gibbslab/errors.hpp"

namespace gibbslab {

namespace {
constexpr char kAxisLetters[3][2] = {{'R', 'L'}, {'U', 'D'}, {'F', 'B'}};

int letter_to_code(char c, int dim) {
    for (int a = 0; a < dim; ++a) {
        if (c == kAxisLetters[a][0]) return 2 * a;
        if (c == kAxisLetters[a][1]) return 2 * a + 1;
    }
    throw ValidationError(std::string("StateId: step letter '") + c + "' invalid for dimension " +
                          std::to_string(dim));
}
}  // namespace

StateId StateId::spins(std::uint64_t bits, int n) {
    if (n < 1 || n > 64) throw ValidationError("StateId: spin count must be in [1, 64]");
    if (n < 64 && (bits >> n) != 0)
        throw ValidationError("StateId: bits set beyond spin count");
    StateId s;
    s.kind_ = StateKind::Spins;
    s.bits_ = bits;
    s.n_ = n;
    return s;
}

StateId StateId::path(int dim, std::vector<std::uint8_t> steps) {
    if (dim < 1 || dim > 3) throw ValidationError("StateId: path dimension must be in {1,2,3}");
    if (steps.empty()) throw ValidationError("StateId: path must have at least one step");
    for (auto c : steps)
        if (c >= 2 * dim)
            throw ValidationError("StateId: step code " + std::to_string(int(c)) +
                                  " out of range for dimension " + std::to_string(dim));
    StateId s;
    s.kind_ = StateKind::Path;
    s.dim_ = dim;
    s.n_ = static_cast<int>(steps.size());
    s.steps_ = std::move(steps);
    return s;
}

StateId StateId::parse_spins(const std::string& text) {
    if (text.empty() || text.size() > 64)
        throw ValidationError("StateId: spin string length must be in [1, 64]");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '1')
            bits |= std::uint64_t{1} << i;
        else if (text[i] != '0')
            throw ValidationError("StateId: spin string must contain only '0'/'1'");
    }
    return spins(bits, static_cast<int>(text.size()));
}

StateId StateId::parse_path(const std::string& text, int dim) {
    if (dim < 1 || dim > 3) throw ValidationError("StateId: path dimension must be in {1,2,3}");
    std::vector<std::uint8_t> steps;
    steps.reserve(text.size());
    for (char c : text) steps.push_back(static_cast<std::uint8_t>(letter_to_code(c, dim)));
    return path(dim, std::move(steps));
}

std::string StateId::text() const {
    std::string out;
    if (kind_ == StateKind::Spins) {
        out.reserve(static_cast<std::size_t>(n_));
        for (int i = 0; i < n_; ++i) out.push_back((bits_ >> i) & 1u ? '1' : '0');
    } else {
        out.reserve(steps_.size());
        for (auto c : steps_) out.push_back(kAxisLetters[c / 2][c % 2]);
    }
    return out;
}

std::array<int, 3> step_vector(int dim, std::uint8_t code) {
    if (dim < 1 || dim > 3 || code >= 2 * dim)
        throw ValidationError("step_vector: bad (dim, code)");
    std::array<int, 3> v{0, 0, 0};
    v[code / 2] = (code % 2 == 0) ? +1 : -1;
    return v;
}

std::vector<std::array<int, 3>> path_sites(const StateId& state) {
    if (state.kind() != StateKind::Path)
        throw ValidationError("path_sites: state is not a path");
    std::vector<std::array<int, 3>> sites;
    sites.reserve(state.steps().size());
    std::array<int, 3> x{0, 0, 0};
    for (auto c : state.steps()) {
        const auto s = step_vector(state.dim(), c);
        for (int a = 0; a < 3; ++a) x[a] += s[a];
        sites.push_back(x);
    }
    return sites;
}

}  // namespace gibbslab
