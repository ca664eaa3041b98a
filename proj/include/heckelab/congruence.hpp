#pragma once
#include <optional>
#include <string>
#include <vector>

#include "heckelab/forms.hpp"
#include "heckelab/padic.hpp"

namespace heckelab {

// Certificate that f and g have matching Hecke eigenvalue residues at every
// prime l <= bound with l not dividing p*N_f*N_g.  prime_f is compared through
// the first embedding of its residue field into F_{p^lcm}; embedding_index
// selects the embedding of prime_g's residue field that matched.
struct CongruenceWitness {
    std::string label_f, label_g;
    long p = 0;
    PrimeIdeal prime_f, prime_g;
    int embedding_index = 0;
    long bound = 0;
    std::vector<long> excluded;  // primes l <= bound with l | p*N_f*N_g
};

// floor(k * mu / 12) at level lcm(N_f, N_g) * p^2.
long default_congruence_bound(const EigenformRecord& f, const EigenformRecord& g, long p);

// Exhaustive over (prime above p in K_f) x (prime above p in K_g) x
// (residue-field embedding), first find wins; the loop order is the sorted
// order of factor_prime and embeddings, so the result is deterministic.
// B <= 0 selects the default bound.  PrecisionTooLow if either record is
// shorter than the bound.
std::optional<CongruenceWitness> detect_congruence(const EigenformRecord& f,
                                                   const EigenformRecord& g, long p,
                                                   long B = 0);

// True iff a_l = 1 + l^{k-1} mod some prime above p for every test prime
// l <= B, l not dividing pN.  B = 0 is vacuously true.
bool is_eisenstein_congruent(const EigenformRecord& f, long p, long B);

// v_P(a_p) = 0, covering both T_p (p coprime to N) and U_p (p | N).
// PrecisionTooLow unless prec >= p.
bool is_ordinary(const EigenformRecord& f, long p, const PrimeIdeal& P);

// Record-level wrappers around the p-adic kernel.  classify_record requires
// p coprime to the level (the dichotomy is stated for good reduction);
// both require prec >= p.
LocalClassification classify_record(const EigenformRecord& f, long p, const PrimeIdeal& P,
                                    long m = 10);
Stabilization p_stabilize(const EigenformRecord& f, long p, const PrimeIdeal& P, long m = 10);

enum class Ramification { PeuRamifiee, TresRamifiee, NotApplicable };

// 1+a for a != 1; at a = 1 the ramification flag picks 2 (peu) or p+1 (tres).
// HypothesisViolated for a outside [1, p-1] or an unresolved a = 1.
long serre_weight(long a, Ramification ram, long p);

// Exponent of the cyclotomic character on inertia for an ordinary form of
// weight k, normalized into [1, p-1]; k = p+1 lands on a = 1.
// HypothesisViolated outside 2 <= k <= p+1.
long inertia_exponent(long k, long p);

// One line of a theorem-verification report; `line` is the serialized form
// the CLI prints verbatim.
struct ReportLine {
    std::string kind;    // "congruence" | "ap-check" | "pnew-check"
    std::string status;  // "pass" | "violation" | "skipped: ..." | "observation: ..."
    std::string line;
};

// detect_congruence rendered as one report line; pair-level conditions
// (insufficient precision, non-maximal order, incomparable weights) become
// "skipped: ..." lines instead of exceptions.  B <= 0 selects the default.
ReportLine congruence_pair_line(const EigenformRecord& f, const EigenformRecord& g, long p,
                                long B = 0);

struct ScanReport {
    long p = 0;
    long pairs_checked = 0;  // congruent pairs whose a_p residues were compared
    long pairs_passed = 0;
    long violations = 0;
    std::vector<ReportLine> lines;  // label order, independent of thread schedule
};

struct ApScanOptions {
    long bound = 0;           // 0 = per-pair default
    bool cross_level = false; // exploratory mode; findings are observations
};

// Scans unordered pairs (including self-pairs) of equal weight and level in
// [level_lo, level_hi] with p coprime to N and 2 <= k <= p+1.  Pairs failing
// the Eisenstein proxy are skipped; congruent pairs must have matching a_p
// residues under the witness embedding.
ScanReport verify_ap_theorem(const Dataset& ds, long p, long level_lo, long level_hi,
                             const ApScanOptions& opts = {});

// Weight-2 records with p | N: a_p = +-1 when p divides N exactly once,
// a_p = 0 when p^2 | N.
ScanReport verify_pnew_properties(const Dataset& ds, long p);

}  // namespace heckelab
