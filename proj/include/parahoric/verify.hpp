#pragma once

// Whole-object verification suites that do not belong to a single module's
// core API: ring axioms and the rescaling round trip of constant families.

#include <cstdint>

#include "parahoric/report.hpp"
#include "parahoric/ring.hpp"
#include "parahoric/rootsystem.hpp"

namespace parahoric {

// Exhaustive: valuation axioms, the ideals R_i, digit expansions over the
// Teichmuller set, and Hensel square roots.
VerificationReport ring_report(const Ring& r);

// Generated families under every sign choice, random rational rescalings and
// a corrupted family, each run through find_rescaling.
VerificationReport unicity_report(const RootSystem& sys, std::uint64_t seed, int random_rescalings = 50);

}  // namespace parahoric
