#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "heckelab/congruence.hpp"
#include "heckelab/errors.hpp"
#include "heckelab/forms.hpp"
#include "heckelab/intmath.hpp"
#include "heckelab/modsym.hpp"
#include "heckelab/phimod.hpp"

using namespace heckelab;

namespace {

// stdout plus optional file mirror; every command prints JSON lines.
struct Emitter {
    std::ofstream file;
    bool mirrored = false;
    void open(const std::string& path) {
        if (path.empty()) return;
        file.open(path, std::ios::trunc);
        if (!file) throw IoError("cannot open output file " + path);
        mirrored = true;
    }
    void line(const std::string& s) {
        std::cout << s << "\n";
        if (mirrored) {
            file << s << "\n";
            if (!file) throw IoError("write failed on output file");
        }
    }
};

long parse_positive(const std::string& s, const char* what) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw UsageError(std::string(what) + ": expected a positive integer, got '" + s + "'");
    try {
        long v = std::stol(s);
        if (v < 1) throw UsageError(std::string(what) + ": must be >= 1");
        return v;
    } catch (const std::out_of_range&) {
        throw UsageError(std::string(what) + ": out of range: " + s);
    }
}

// "A..B", "A.." (same as A..A) or a single level "A".
std::pair<long, long> parse_level_range(const std::string& s) {
    auto pos = s.find("..");
    if (pos == std::string::npos) {
        long v = parse_positive(s, "--levels");
        return {v, v};
    }
    long lo = parse_positive(s.substr(0, pos), "--levels");
    std::string rest = s.substr(pos + 2);
    long hi = rest.empty() ? lo : parse_positive(rest, "--levels");
    if (hi < lo) throw UsageError("--levels: empty range " + s);
    return {lo, hi};
}

std::vector<long> parse_prime_list(const std::string& s) {
    std::vector<long> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, ',')) out.push_back(parse_positive(cur, "--p"));
    if (out.empty()) throw UsageError("--p: empty prime list");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Strict rational grammar -?digits(/digits)?, matching the record format.
mpq_class parse_rational_arg(const std::string& s, const char* what) {
    size_t i = 0;
    bool ok = !s.empty();
    if (ok && s[i] == '-') ++i;
    size_t digits = 0;
    while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++digits;
    ok = ok && digits > 0;
    if (ok && i < s.size()) {
        ok = s[i] == '/';
        ++i;
        size_t den = 0;
        while (i < s.size() && s[i] >= '0' && s[i] <= '9') ++i, ++den;
        ok = ok && den > 0 && i == s.size();
    }
    if (!ok) throw UsageError(std::string(what) + ": expected a rational, got '" + s + "'");
    mpq_class q(s);
    if (q.get_den() == 0) throw UsageError(std::string(what) + ": zero denominator");
    q.canonicalize();
    return q;
}

Dataset load_dataset(const std::vector<std::string>& paths) {
    Dataset ds;
    for (const auto& p : paths)
        for (auto& r : import_qexp(p)) ds.add(std::move(r));
    return ds;
}

std::vector<const EigenformRecord*> sorted_records(const Dataset& ds) {
    std::vector<const EigenformRecord*> v;
    for (const auto& r : ds.records()) v.push_back(&r);
    std::sort(v.begin(), v.end(),
              [](const EigenformRecord* a, const EigenformRecord* b) { return a->label < b->label; });
    return v;
}

std::string mpz_list_json(const std::vector<mpz_class>& v) {
    std::string s = "[";
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += "\"" + v[i].get_str() + "\"";
    }
    return s + "]";
}

std::string prime_json(const PrimeIdeal& P) {
    std::string s = "[";
    for (size_t i = 0; i < P.local.size(); ++i) {
        if (i) s += ",";
        s += P.local[i].get_str();
    }
    return s + "]";
}

EigenformRecord synthetic_record(const std::string& ap_str, long k, long p) {
    EigenformRecord r;
    r.label = "synthetic";
    r.level = 1;
    r.weight = k;
    r.field_poly = {0, 1};
    r.hecke_field = NumberField::create(r.field_poly);
    r.an[1] = {mpq_class(1)};
    r.an[p] = {parse_rational_arg(ap_str, "--ap")};
    r.prec = p;
    r.source = "ingested";
    return r;
}

struct RecordArgs {
    std::string label;
    std::vector<std::string> dataset;
    std::string ap;
    long k = 2;
    long p = 0;
    long m = 10;
    long prime_index = 0;
};

EigenformRecord resolve_record(const RecordArgs& a, const char* cmd) {
    if (!a.ap.empty()) {
        if (!a.label.empty())
            throw UsageError(std::string(cmd) + ": give either a label or --ap, not both");
        return synthetic_record(a.ap, a.k, a.p);
    }
    if (a.label.empty()) throw UsageError(std::string(cmd) + ": a record label (or --ap) is required");
    if (!a.dataset.empty()) {
        Dataset ds = load_dataset(a.dataset);
        const EigenformRecord* r = ds.find(a.label);
        if (!r) throw NotFound(std::string(cmd) + ": label " + a.label + " not in dataset");
        return *r;
    }
    return cache_get(a.label);
}

PrimeIdeal resolve_prime(const EigenformRecord& rec, const RecordArgs& a, const char* cmd) {
    if (!is_prime(a.p)) throw UsageError(std::string(cmd) + ": --p must be prime");
    auto primes = factor_prime(rec.hecke_field, a.p);
    if (a.prime_index < 0 || static_cast<size_t>(a.prime_index) >= primes.size())
        throw UsageError(std::string(cmd) + ": --prime index out of range (field has " +
                         std::to_string(primes.size()) + " primes above " + std::to_string(a.p) + ")");
    return primes[static_cast<size_t>(a.prime_index)];
}

int exit_code_for(const Error& e) {
    const std::string& k = e.kind();
    if (k == "UsageError" || k == "HypothesisViolated" || k == "LevelTooLarge") return 2;
    return 3;  // parse/validation/lookup/io/precision/ordinarity/order defects: data errors
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact weight-2 Hecke eigensystems on Gamma_0(N): computation, congruences, "
                 "local invariants, filtered phi-module checks"};
    app.require_subcommand(1);

    std::string cache_dir, output;
    long threads = 0;
    app.add_option("--cache-dir", cache_dir,
                   "record cache directory (overrides HECKELAB_CACHE_DIR; default ./cache)");
    app.add_option("--threads", threads, "worker count (affects wall time only, never output)");
    app.add_option("--output", output, "mirror report lines into this file");

    auto* compute = app.add_subcommand("compute", "compute newform eigenvalue records");
    std::string levels = "1..1";
    long nterms = 30;
    compute->add_option("--levels", levels, "level range A..B (or a single level)")->required();
    compute->add_option("--nterms", nterms, "number of a_n to compute per record");

    auto* congruences =
        app.add_subcommand("congruences", "pairwise congruence detection over a dataset");
    std::vector<std::string> cg_dataset;
    long cg_p = 0, cg_bound = 0;
    bool cg_self = false;
    congruences->add_option("--dataset", cg_dataset, "record file(s), one JSON record per line")
        ->required();
    congruences->add_option("--p", cg_p, "residue characteristic")->required();
    congruences->add_option("--bound", cg_bound, "override the Sturm-type bound");
    congruences->add_flag("--include-self", cg_self, "also emit reflexive witnesses");

    auto* verify = app.add_subcommand("verify", "theorem scans (a_p congruence, p-new properties)");
    std::vector<std::string> vf_dataset;
    std::string vf_plist, vf_levels = "1..2000";
    long vf_bound = 0;
    bool vf_cross = false;
    verify->add_option("--dataset", vf_dataset, "record file(s)")->required();
    verify->add_option("--p", vf_plist, "comma-separated primes")->required();
    verify->add_option("--levels", vf_levels, "restrict scanned levels to A..B");
    verify->add_option("--bound", vf_bound, "override the congruence bound");
    verify->add_flag("--cross-level", vf_cross,
                     "also compare across levels (observations, never violations)");

    RecordArgs cl, st;
    auto* classify = app.add_subcommand("classify", "ordinary/irreducible dichotomy at p");
    classify->add_option("label", cl.label, "record label (cache or --dataset)");
    classify->add_option("--dataset", cl.dataset, "record file(s) to search instead of the cache");
    classify->add_option("--p", cl.p, "prime p")->required();
    classify->add_option("--m", cl.m, "p-adic working precision p^m");
    classify->add_option("--prime", cl.prime_index, "index of the prime above p (default 0)");
    classify->add_option("--ap", cl.ap, "classify a bare eigenvalue instead of a record");
    classify->add_option("--k", cl.k, "weight for --ap mode (default 2)");

    auto* stabilize = app.add_subcommand("stabilize", "U_p eigenvalues of the p-stabilizations");
    stabilize->add_option("label", st.label, "record label (cache or --dataset)");
    stabilize->add_option("--dataset", st.dataset, "record file(s) to search instead of the cache");
    stabilize->add_option("--p", st.p, "prime p")->required();
    stabilize->add_option("--m", st.m, "p-adic working precision p^m");
    stabilize->add_option("--prime", st.prime_index, "index of the prime above p (default 0)");
    stabilize->add_option("--ap", st.ap, "stabilize a bare eigenvalue instead of a record");
    stabilize->add_option("--k", st.k, "weight for --ap mode (default 2)");

    auto* phimod = app.add_subcommand("phimod", "filtered phi-module commutant checks");
    std::string pm_plist;
    long pm_samples = 1000, pm_bc = 500;
    phimod->add_option("--p", pm_plist, "comma-separated odd primes")->required();
    phimod->add_option("--samples", pm_samples, "random samples for the quaternion checks");
    phimod->add_option("--bc-samples", pm_bc, "random (A, T) samples for base-change covariance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (threads > 0) omp_set_num_threads(static_cast<int>(threads));
        if (!cache_dir.empty()) set_cache_root(cache_dir);
        Emitter em;
        em.open(output);

        if (*compute) {
            auto [lo, hi] = parse_level_range(levels);
            if (nterms < 1) throw UsageError("compute: --nterms must be >= 1");
            std::vector<EigenformRecord> recs;
            for (long N = lo; N <= hi; ++N)
                for (const auto& orbit : newform_decomposition(N, nterms))
                    recs.push_back(record_from_orbit(orbit));
            // nothing is written until the whole range has been computed
            for (const auto& r : recs) {
                cache_put(r);
                em.line(serialize_record(r));
            }
            return 0;
        }

        if (*congruences) {
            if (!is_prime(cg_p)) throw UsageError("congruences: --p must be prime");
            Dataset ds = load_dataset(cg_dataset);
            auto recs = sorted_records(ds);
            for (size_t i = 0; i < recs.size(); ++i)
                for (size_t j = cg_self ? i : i + 1; j < recs.size(); ++j)
                    em.line(congruence_pair_line(*recs[i], *recs[j], cg_p, cg_bound).line);
            return 0;
        }

        if (*verify) {
            auto [lo, hi] = parse_level_range(vf_levels);
            Dataset ds = load_dataset(vf_dataset);
            ApScanOptions opts;
            opts.bound = vf_bound;
            opts.cross_level = vf_cross;
            long violations = 0;
            for (long p : parse_prime_list(vf_plist)) {
                if (!is_prime(p)) throw UsageError("verify: --p entries must be prime");
                ScanReport ap = verify_ap_theorem(ds, p, lo, hi, opts);
                for (const auto& l : ap.lines) em.line(l.line);
                violations += ap.violations;
                ScanReport pn = verify_pnew_properties(ds, p);
                for (const auto& l : pn.lines) em.line(l.line);
                violations += pn.violations;
            }
            return violations > 0 ? 1 : 0;
        }

        if (*classify) {
            EigenformRecord rec = resolve_record(cl, "classify");
            PrimeIdeal P = resolve_prime(rec, cl, "classify");
            LocalClassification c = classify_record(rec, cl.p, P, cl.m);
            std::ostringstream os;
            os << "{\"kind\":\"classify\",\"label\":\"" << json_escape(rec.label)
               << "\",\"p\":" << cl.p << ",\"prime\":" << prime_json(P) << ",\"local\":\""
               << (c.ordinary ? "ordinary" : "irreducible") << "\"";
            if (c.ordinary)
                os << ",\"unit_root_residue\":\"" << P.residue->index(c.unit_root_residue).get_str()
                   << "\",\"unit_root\":" << mpz_list_json(c.unit_root)
                   << ",\"precision\":" << c.precision << ",\"modulus\":\"" << c.modulus.get_str()
                   << "\"";
            os << "}";
            em.line(os.str());
            return 0;
        }

        if (*stabilize) {
            EigenformRecord rec = resolve_record(st, "stabilize");
            PrimeIdeal P = resolve_prime(rec, st, "stabilize");
            Stabilization s = p_stabilize(rec, st.p, P, st.m);
            std::ostringstream os;
            os << "{\"kind\":\"stabilize\",\"label\":\"" << json_escape(rec.label)
               << "\",\"p\":" << st.p << ",\"prime\":" << prime_json(P)
               << ",\"alpha\":" << mpz_list_json(s.alpha) << ",\"beta\":" << mpz_list_json(s.beta)
               << ",\"beta_valuation\":" << s.beta_valuation << ",\"precision\":" << s.precision
               << ",\"modulus\":\"" << s.modulus.get_str() << "\"}";
            em.line(os.str());
            return 0;
        }

        if (*phimod) {
            bool failed = false;
            for (long p : parse_prime_list(pm_plist)) {
                if (p == 2 || !is_prime(p))
                    throw UsageError("phimod: p must be an odd prime, got " + std::to_string(p));
                for (const auto& l : phimod_report(p, p, pm_samples, pm_bc)) {
                    em.line(l.line);
                    if (l.status != "pass") failed = true;
                }
            }
            return failed ? 1 : 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.kind() << ": " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
