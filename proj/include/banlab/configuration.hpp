#pragma once

#include <banlab/error.hpp>

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace banlab {

/// Networks are limited to 64 automata so that a configuration fits in one
/// machine word. Exhaustive operations are capped far below this.
inline constexpr std::size_t max_network_size = 64;

using Bits = std::uint64_t;

inline constexpr Bits low_mask(std::size_t n) {
    return n >= 64 ? ~Bits{0} : ((Bits{1} << n) - 1);
}

/// A subset of the automata {0, ..., n-1}, stored as a bit mask.
class AutomatonSet {
public:
    constexpr AutomatonSet() = default;
    constexpr explicit AutomatonSet(Bits mask) : mask_(mask) {}
    AutomatonSet(std::initializer_list<std::size_t> ids) {
        for (std::size_t i : ids) {
            insert(i);
        }
    }

    static AutomatonSet from_ids(const std::vector<std::size_t>& ids) {
        AutomatonSet s;
        for (std::size_t i : ids) {
            s.insert(i);
        }
        return s;
    }
    static constexpr AutomatonSet all(std::size_t n) { return AutomatonSet(low_mask(n)); }
    static constexpr AutomatonSet singleton(std::size_t i) { return AutomatonSet(Bits{1} << i); }

    constexpr Bits mask() const { return mask_; }
    constexpr bool empty() const { return mask_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask_)); }
    constexpr bool contains(std::size_t i) const { return i < 64 && ((mask_ >> i) & 1U) != 0; }
    constexpr bool subset_of(AutomatonSet other) const { return (mask_ & ~other.mask_) == 0; }

    void insert(std::size_t i) {
        if (i >= max_network_size) {
            throw PreconditionError("automaton index " + std::to_string(i) + " is out of range");
        }
        mask_ |= Bits{1} << i;
    }

    /// Largest member plus one; 0 for the empty set.
    constexpr std::size_t bound() const { return mask_ == 0 ? 0 : 64 - static_cast<std::size_t>(std::countl_zero(mask_)); }

    std::vector<std::size_t> ids() const {
        std::vector<std::size_t> out;
        for (Bits m = mask_; m != 0; m &= m - 1) {
            out.push_back(static_cast<std::size_t>(std::countr_zero(m)));
        }
        return out;
    }

    /// "{0,2}" style rendering; "{}" for the empty set.
    std::string to_string() const {
        std::string out = "{";
        bool first = true;
        for (std::size_t i : ids()) {
            if (!first) {
                out += ',';
            }
            out += std::to_string(i);
            first = false;
        }
        out += '}';
        return out;
    }

    friend constexpr AutomatonSet operator&(AutomatonSet a, AutomatonSet b) { return AutomatonSet(a.mask_ & b.mask_); }
    friend constexpr AutomatonSet operator|(AutomatonSet a, AutomatonSet b) { return AutomatonSet(a.mask_ | b.mask_); }
    friend constexpr AutomatonSet operator-(AutomatonSet a, AutomatonSet b) { return AutomatonSet(a.mask_ & ~b.mask_); }
    friend constexpr bool operator==(AutomatonSet, AutomatonSet) = default;
    friend constexpr auto operator<=>(AutomatonSet a, AutomatonSet b) { return a.mask_ <=> b.mask_; }

private:
    Bits mask_ = 0;
};

/// A global network state: x_0 ... x_{n-1}. The integer rendering puts x_0
/// in the least-significant bit; the text rendering writes x_0 first.
class Configuration {
public:
    Configuration() = default;
    Configuration(std::size_t n, Bits bits) : bits_(bits & low_mask(n)), size_(n) { check_size(n); }
    Configuration(std::initializer_list<int> values) : size_(values.size()) {
        check_size(size_);
        std::size_t i = 0;
        for (int v : values) {
            if (v != 0) {
                bits_ |= Bits{1} << i;
            }
            ++i;
        }
    }

    static Configuration zeros(std::size_t n) { return Configuration(n, 0); }

    static Configuration from_integer(std::size_t n, Bits value) {
        check_size(n);
        if ((value & ~low_mask(n)) != 0) {
            throw PreconditionError("integer " + std::to_string(value) + " does not encode a configuration of size " +
                                    std::to_string(n));
        }
        return Configuration(n, value);
    }

    /// Parses "101" (x_0 first). Throws ParseError on anything but 0/1.
    static Configuration from_text(std::string_view text) {
        check_size(text.size());
        Bits bits = 0;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] == '1') {
                bits |= Bits{1} << i;
            } else if (text[i] != '0') {
                throw ParseError("configuration must consist of 0/1 characters", 0, i);
            }
        }
        return Configuration(text.size(), bits);
    }

    std::size_t size() const { return size_; }
    Bits bits() const { return bits_; }
    Bits to_integer() const { return bits_; }
    bool operator[](std::size_t i) const { return ((bits_ >> i) & 1U) != 0; }

    std::string text() const {
        std::string out(size_, '0');
        for (std::size_t i = 0; i < size_; ++i) {
            if ((*this)[i]) {
                out[i] = '1';
            }
        }
        return out;
    }

    /// Tuple rendering "(1,0,1)".
    std::string tuple() const {
        std::string out = "(";
        for (std::size_t i = 0; i < size_; ++i) {
            if (i != 0) {
                out += ',';
            }
            out += (*this)[i] ? '1' : '0';
        }
        out += ')';
        return out;
    }

    friend bool operator==(const Configuration&, const Configuration&) = default;
    friend auto operator<=>(const Configuration& a, const Configuration& b) {
        if (auto c = a.size_ <=> b.size_; c != 0) {
            return c;
        }
        return a.bits_ <=> b.bits_;
    }

private:
    static void check_size(std::size_t n) {
        if (n > max_network_size) {
            throw CapacityError("configurations are limited to " + std::to_string(max_network_size) + " automata");
        }
    }

    Bits bits_ = 0;
    std::size_t size_ = 0;
};

/// x with the bits in W negated.
inline Configuration flip(const Configuration& x, AutomatonSet w) {
    if (w.bound() > x.size()) {
        throw PreconditionError("flip: automaton set " + w.to_string() + " is out of range for size " +
                                std::to_string(x.size()));
    }
    return Configuration(x.size(), x.bits() ^ w.mask());
}

/// D(x, y): the automata whose states differ.
inline AutomatonSet differing(const Configuration& x, const Configuration& y) {
    if (x.size() != y.size()) {
        throw PreconditionError("configurations of different sizes");
    }
    return AutomatonSet(x.bits() ^ y.bits());
}

}  // namespace banlab
