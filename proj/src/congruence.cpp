#include "heckelab/congruence.hpp"

#include <algorithm>
#include <atomic>
#include <numeric>
#include <sstream>

#include "heckelab/errors.hpp"
#include "heckelab/intmath.hpp"

namespace heckelab {
namespace {

std::vector<long> test_primes(long B, long p, long Nf, long Ng) {
    std::vector<long> out;
    for (long l : primes_upto(B))
        if (l != p && Nf % l != 0 && Ng % l != 0) out.push_back(l);
    return out;
}

std::vector<long> excluded_primes(long B, long p, long Nf, long Ng) {
    std::vector<long> out;
    for (long l : primes_upto(B))
        if (l == p || Nf % l == 0 || Ng % l == 0) out.push_back(l);
    return out;
}

std::string long_list_json(const std::vector<long>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

std::string poly_json(const modp::Poly& g) {
    std::string s = "[";
    for (size_t i = 0; i < g.size(); ++i) {
        if (i) s += ",";
        s += g[i].get_str();
    }
    return s + "]";
}

void check_prime_matches(const EigenformRecord& f, long p, const PrimeIdeal& P,
                         const char* op) {
    if (P.p != p)
        throw UsageError(std::string(op) + ": prime ideal lies above " + P.p.get_str() +
                         ", not " + std::to_string(p));
    if (P.field->modulus() != f.hecke_field->modulus())
        throw UsageError(std::string(op) + ": prime ideal belongs to a different Hecke field");
}

ReportLine congruence_line(const EigenformRecord& f, const EigenformRecord& g, long p,
                           const std::optional<CongruenceWitness>& w, long B) {
    std::ostringstream os;
    os << "{\"kind\":\"congruence\",\"f\":\"" << json_escape(f.label) << "\",\"g\":\""
       << json_escape(g.label) << "\",\"p\":" << p
       << ",\"congruent\":" << (w ? "true" : "false");
    if (w)
        os << ",\"prime_f\":" << poly_json(w->prime_f.local)
           << ",\"prime_g\":" << poly_json(w->prime_g.local)
           << ",\"embedding\":" << w->embedding_index;
    os << ",\"bound\":" << B
       << ",\"excluded\":" << long_list_json(excluded_primes(B, p, f.level, g.level)) << "}";
    return {"congruence", w ? "congruent" : "not-congruent", os.str()};
}

ReportLine ap_line(const EigenformRecord& f, const EigenformRecord& g, long p,
                   const std::string& status, const std::string& residue_f,
                   const std::string& residue_g, long B) {
    std::ostringstream os;
    os << "{\"kind\":\"ap-check\",\"f\":\"" << json_escape(f.label) << "\",\"g\":\""
       << json_escape(g.label) << "\",\"p\":" << p << ",\"status\":\"" << json_escape(status)
       << "\"";
    if (!residue_f.empty())
        os << ",\"residue_f\":\"" << residue_f << "\",\"residue_g\":\"" << residue_g << "\"";
    if (B > 0) os << ",\"bound\":" << B;
    os << "}";
    return {"ap-check", status, os.str()};
}

}  // namespace

long default_congruence_bound(const EigenformRecord& f, const EigenformRecord& g, long p) {
    long level = std::lcm(f.level, g.level) * p * p;
    return sturm_bound(level, f.weight);
}

std::optional<CongruenceWitness> detect_congruence(const EigenformRecord& f,
                                                   const EigenformRecord& g, long p, long B) {
    if (f.weight != g.weight)
        throw UsageError("detect_congruence: records have different weights");
    if (!is_prime(p)) throw UsageError("detect_congruence: p must be prime");
    if (B <= 0) B = default_congruence_bound(f, g, p);
    if (f.prec < B || g.prec < B)
        throw PrecisionTooLow("detect_congruence: need a_n up to n = " + std::to_string(B) +
                              " but prec is " + std::to_string(std::min(f.prec, g.prec)));
    std::vector<long> tests = test_primes(B, p, f.level, g.level);

    auto primes_f = factor_prime(f.hecke_field, p);
    auto primes_g = factor_prime(g.hecke_field, p);
    for (const auto& pf : primes_f) {
        std::vector<FFElem> rf;
        for (long l : tests) rf.push_back(reduce_mod(f.an.at(l), pf));
        for (const auto& pg : primes_g) {
            std::vector<FFElem> rg;
            for (long l : tests) rg.push_back(reduce_mod(g.an.at(l), pg));
            unsigned fl = std::lcm(static_cast<unsigned>(pf.f), static_cast<unsigned>(pg.f));
            FFPtr L = FiniteField::get(p, fl);
            const FFEmbedding ef = embeddings(pf.residue, L).front();
            std::vector<FFElem> rf_l;
            for (const auto& r : rf) rf_l.push_back(ef.apply(r));
            auto embs_g = embeddings(pg.residue, L);
            for (size_t j = 0; j < embs_g.size(); ++j) {
                bool all = true;
                for (size_t i = 0; i < tests.size() && all; ++i)
                    all = rf_l[i] == embs_g[j].apply(rg[i]);
                if (all) {
                    CongruenceWitness w;
                    w.label_f = f.label;
                    w.label_g = g.label;
                    w.p = p;
                    w.prime_f = pf;
                    w.prime_g = pg;
                    w.embedding_index = static_cast<int>(j);
                    w.bound = B;
                    w.excluded = excluded_primes(B, p, f.level, g.level);
                    return w;
                }
            }
        }
    }
    return std::nullopt;
}

bool is_eisenstein_congruent(const EigenformRecord& f, long p, long B) {
    if (!is_prime(p)) throw UsageError("is_eisenstein_congruent: p must be prime");
    if (B > 0 && f.prec < B)
        throw PrecisionTooLow("is_eisenstein_congruent: need a_n up to n = " +
                              std::to_string(B) + " but prec is " + std::to_string(f.prec));
    std::vector<long> tests = test_primes(B, p, f.level, f.level);
    if (tests.empty()) return true;
    for (const auto& P : factor_prime(f.hecke_field, p)) {
        bool all = true;
        for (size_t i = 0; i < tests.size() && all; ++i) {
            mpz_class e;
            mpz_ui_pow_ui(e.get_mpz_t(), static_cast<unsigned long>(tests[i]),
                          static_cast<unsigned long>(f.weight - 1));
            e += 1;
            all = reduce_mod(f.an.at(tests[i]), P) == P.residue->from_int(e);
        }
        if (all) return true;
    }
    return false;
}

ReportLine congruence_pair_line(const EigenformRecord& f, const EigenformRecord& g, long p,
                                long B) {
    auto skip = [&](const char* why) {
        std::ostringstream os;
        os << "{\"kind\":\"congruence\",\"f\":\"" << json_escape(f.label) << "\",\"g\":\""
           << json_escape(g.label) << "\",\"p\":" << p << ",\"status\":\"" << why << "\"}";
        return ReportLine{"congruence", why, os.str()};
    };
    if (f.weight != g.weight) return skip("skipped: weight mismatch");
    long bound = B > 0 ? B : default_congruence_bound(f, g, p);
    try {
        return congruence_line(f, g, p, detect_congruence(f, g, p, B), bound);
    } catch (const PrecisionTooLow&) {
        return skip("skipped: precision too low");
    } catch (const NotPMaximal&) {
        return skip("skipped: hecke order not p-maximal");
    }
}

bool is_ordinary(const EigenformRecord& f, long p, const PrimeIdeal& P) {
    if (!is_prime(p)) throw UsageError("is_ordinary: p must be prime");
    check_prime_matches(f, p, P, "is_ordinary");
    if (f.prec < p)
        throw PrecisionTooLow("is_ordinary: record stops at n = " + std::to_string(f.prec) +
                              " < p");
    return is_ordinary_value(f.an.at(p), P);
}

LocalClassification classify_record(const EigenformRecord& f, long p, const PrimeIdeal& P,
                                    long m) {
    if (!is_prime(p)) throw UsageError("classify: p must be prime");
    check_prime_matches(f, p, P, "classify");
    if (f.level % p == 0)
        throw HypothesisViolated("classify: p divides the level " + std::to_string(f.level));
    if (f.prec < p)
        throw PrecisionTooLow("classify: record stops at n = " + std::to_string(f.prec) +
                              " < p");
    return classify_local(f.an.at(p), f.weight, P, m);
}

Stabilization p_stabilize(const EigenformRecord& f, long p, const PrimeIdeal& P, long m) {
    if (!is_prime(p)) throw UsageError("p_stabilize: p must be prime");
    check_prime_matches(f, p, P, "p_stabilize");
    if (f.level % p == 0)
        throw UsageError("p_stabilize: p divides the level; a_p is already a U_p eigenvalue");
    if (f.prec < p)
        throw PrecisionTooLow("p_stabilize: record stops at n = " + std::to_string(f.prec) +
                              " < p");
    return p_stabilize_value(f.an.at(p), f.weight, P, m);
}

long serre_weight(long a, Ramification ram, long p) {
    if (p < 2 || !is_prime(p)) throw UsageError("serre_weight: p must be prime");
    if (a < 1 || a > p - 1)
        throw HypothesisViolated("serre_weight: a = " + std::to_string(a) +
                                 " outside [1, p-1]");
    if (a != 1) return 1 + a;
    if (ram == Ramification::PeuRamifiee) return 2;
    if (ram == Ramification::TresRamifiee) return p + 1;
    throw HypothesisViolated("serre_weight: a = 1 requires the peu/tres ramifiee flag");
}

long inertia_exponent(long k, long p) {
    if (p < 2 || !is_prime(p)) throw UsageError("inertia_exponent: p must be prime");
    if (k < 2 || k > p + 1)
        throw HypothesisViolated("inertia_exponent: weight " + std::to_string(k) +
                                 " outside [2, p+1]");
    long a = (k - 1) % (p - 1);
    return a == 0 ? p - 1 : a;
}

ScanReport verify_ap_theorem(const Dataset& ds, long p, long level_lo, long level_hi,
                             const ApScanOptions& opts) {
    if (!is_prime(p)) throw UsageError("verify_ap_theorem: p must be prime");
    std::vector<const EigenformRecord*> recs;
    for (const auto& r : ds.records())
        if (r.level >= level_lo && r.level <= level_hi && r.level % p != 0 && r.weight >= 2 &&
            r.weight <= p + 1)
            recs.push_back(&r);
    std::sort(recs.begin(), recs.end(),
              [](const EigenformRecord* a, const EigenformRecord* b) {
                  return a->label < b->label;
              });

    struct Task {
        const EigenformRecord *f, *g;
        bool cross;
    };
    std::vector<Task> tasks;
    for (size_t i = 0; i < recs.size(); ++i)
        for (size_t j = i; j < recs.size(); ++j) {
            if (recs[i]->weight != recs[j]->weight) continue;
            if (recs[i]->level == recs[j]->level)
                tasks.push_back({recs[i], recs[j], false});
            else if (opts.cross_level)
                tasks.push_back({recs[i], recs[j], true});
        }

    std::vector<std::vector<ReportLine>> results(tasks.size());
    std::atomic<bool> failed{false};
    std::string err_kind, err_what;

#pragma omp parallel for schedule(dynamic)
    for (long ti = 0; ti < static_cast<long>(tasks.size()); ++ti) {
        if (failed.load()) continue;
        const Task& t = tasks[static_cast<size_t>(ti)];
        const EigenformRecord& f = *t.f;
        const EigenformRecord& g = *t.g;
        std::vector<ReportLine> out;
        try {
            long B = opts.bound > 0 ? opts.bound : default_congruence_bound(f, g, p);
            try {
                if (!t.cross && (is_eisenstein_congruent(f, p, B) ||
                                 is_eisenstein_congruent(g, p, B))) {
                    out.push_back(ap_line(f, g, p, "skipped: reducibility suspected", "", "", 0));
                } else if (auto w = detect_congruence(f, g, p, B)) {
                    out.push_back(congruence_line(f, g, p, w, B));
                    if (f.prec < p || g.prec < p)
                        throw PrecisionTooLow("verify_ap_theorem: a_p missing, prec < p for " +
                                              f.label + " / " + g.label);
                    unsigned fl = std::lcm(static_cast<unsigned>(w->prime_f.f),
                                           static_cast<unsigned>(w->prime_g.f));
                    FFPtr L = FiniteField::get(p, fl);
                    FFElem rf = embeddings(w->prime_f.residue, L)
                                    .front()
                                    .apply(reduce_mod(f.an.at(p), w->prime_f));
                    FFElem rg = embeddings(w->prime_g.residue, L)
                                    .at(static_cast<size_t>(w->embedding_index))
                                    .apply(reduce_mod(g.an.at(p), w->prime_g));
                    bool ok = rf == rg;
                    std::string status =
                        t.cross ? (ok ? "observation: cross-level ap-match"
                                      : "observation: cross-level ap-mismatch")
                                : (ok ? "pass" : "violation");
                    out.push_back(ap_line(f, g, p, status, L->index(rf).get_str(),
                                          L->index(rg).get_str(), B));
                } else {
                    out.push_back(congruence_line(f, g, p, w, B));
                }
            } catch (const NotPMaximal&) {
                out.push_back(
                    ap_line(f, g, p, "skipped: hecke order not p-maximal", "", "", 0));
            }
            results[static_cast<size_t>(ti)] = std::move(out);
        } catch (const Error& e) {
#pragma omp critical
            if (!failed.exchange(true)) {
                err_kind = e.kind();
                err_what = e.what();
            }
        } catch (const std::exception& e) {
#pragma omp critical
            if (!failed.exchange(true)) {
                err_kind = "UsageError";
                err_what = e.what();
            }
        }
    }
    if (failed.load()) {
        if (err_kind == "PrecisionTooLow") throw PrecisionTooLow(err_what);
        throw UsageError(err_what);
    }

    ScanReport rep;
    rep.p = p;
    for (auto& lines : results)
        for (auto& l : lines) {
            if (l.kind == "ap-check") {
                if (l.status == "pass" || l.status == "violation") {
                    ++rep.pairs_checked;
                    if (l.status == "pass") ++rep.pairs_passed;
                    else ++rep.violations;
                }
            }
            rep.lines.push_back(std::move(l));
        }
    return rep;
}

ScanReport verify_pnew_properties(const Dataset& ds, long p) {
    if (!is_prime(p)) throw UsageError("verify_pnew_properties: p must be prime");
    std::vector<const EigenformRecord*> recs;
    for (const auto& r : ds.records())
        if (r.weight == 2 && r.level % p == 0) recs.push_back(&r);
    std::sort(recs.begin(), recs.end(),
              [](const EigenformRecord* a, const EigenformRecord* b) {
                  return a->label < b->label;
              });

    ScanReport rep;
    rep.p = p;
    for (const EigenformRecord* rp : recs) {
        const EigenformRecord& r = *rp;
        bool p_squared = r.level % (p * p) == 0;
        const char* property = p_squared ? "ap-zero" : "ap-unit-square";
        std::string status;
        bool counted = false, ok = false;
        if (r.prec < p) {
            status = "skipped: prec < p";
        } else {
            const NumberField& K = *r.hecke_field;
            const NFCoords& ap = r.an.at(p);
            ok = p_squared ? K.is_zero(ap)
                           : (ap == K.one() || ap == K.neg(K.one()));
            status = ok ? "pass" : "violation";
            counted = true;
        }
        std::ostringstream os;
        os << "{\"kind\":\"pnew-check\",\"label\":\"" << json_escape(r.label)
           << "\",\"p\":" << p << ",\"property\":\"" << property << "\",\"status\":\""
           << json_escape(status) << "\"}";
        rep.lines.push_back({"pnew-check", status, os.str()});
        if (counted) {
            ++rep.pairs_checked;
            if (ok) ++rep.pairs_passed;
            else ++rep.violations;
        }
    }
    return rep;
}

}  // namespace heckelab
