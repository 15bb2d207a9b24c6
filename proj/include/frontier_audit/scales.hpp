#pragma once

#include <array>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace frontier_audit {

// Capability scales the table can carry. Only pairwise differences on a
// single scale are meaningful; none of the code below ever interprets an
// absolute level.
enum class Scale : unsigned char {
    eci,        // real-valued capability index
    arena_elo,  // real-valued pairwise-preference rating
    aa_index,   // integer-grade benchmark composite
};

inline constexpr std::array<Scale, 3> kAllScales = {Scale::eci, Scale::arena_elo,
                                                    Scale::aa_index};

inline constexpr std::string_view scale_name(Scale s) {
    switch (s) {
        case Scale::eci:
            return "eci";
        case Scale::arena_elo:
            return "arena";
        case Scale::aa_index:
            return "aa";
    }
    return "?";
}

// Integer-grade scales compare with exact integer semantics; sub-unit
// differences cannot exist on them.
inline constexpr bool integer_grade(Scale s) { return s == Scale::aa_index; }

inline Scale parse_scale(std::string_view token) {
    if (token == "eci") return Scale::eci;
    if (token == "arena" || token == "arena_elo" || token == "elo") return Scale::arena_elo;
    if (token == "aa" || token == "aa_index") return Scale::aa_index;
    throw ConfigError("unknown scale '" + std::string(token) + "' (expected eci|arena|aa)");
}

}  // namespace frontier_audit
