#pragma once
#include <map>
#include <string>
#include <vector>

#include "heckelab/modsym.hpp"
#include "heckelab/numberfield.hpp"

namespace heckelab {

// On-disk unit of eigenform data.  Serialized as one line per record:
//   {"label":..,"level":..,"weight":..,"character":"trivial",
//    "field_poly":[ascending integer coefficients],
//    "an":{"n":[rational strings, power-basis coordinates]},"prec":..,
//    "source":"engine"|"ingested"}
// Rationals travel as exact strings; the writer emits a fixed key order and
// canonical rationals so equal records serialize to identical bytes.
struct EigenformRecord {
    std::string label;
    long level = 1;
    long weight = 2;
    std::string character = "trivial";
    ZPoly field_poly;             // monic irreducible, ascending
    NFPtr hecke_field;            // Q[x]/(field_poly)
    std::map<long, NFCoords> an;  // n -> a_n for 1 <= n <= prec
    long prec = 0;
    std::string source = "engine";  // "engine" | "ingested"
};

inline bool operator==(const EigenformRecord& a, const EigenformRecord& b) {
    return a.label == b.label && a.level == b.level && a.weight == b.weight &&
           a.character == b.character && a.field_poly == b.field_poly && a.an == b.an &&
           a.prec == b.prec && a.source == b.source;
}
inline bool operator!=(const EigenformRecord& a, const EigenformRecord& b) { return !(a == b); }

EigenformRecord record_from_orbit(const EigenformOrbit& orbit);

// Minimal JSON string escaping shared by the record and report writers.
std::string json_escape(const std::string& s);

// Invariant checking is report-valued: every violation is listed with the
// index n where it occurs.  invariant is one of "normalization",
// "multiplicativity", "recurrence", or "structure" (missing/ill-sized a_n).
struct ValidationIssue {
    std::string invariant;
    long n = 0;
    std::string detail;
};
using ValidationReport = std::vector<ValidationIssue>;

ValidationReport validate(const EigenformRecord& rec);

std::string serialize_record(const EigenformRecord& rec);

// `where` prefixes error messages, e.g. "forms.qexp:3".  ParseError carries
// the offending field; records without a "source" key come back "ingested".
EigenformRecord parse_record(const std::string& line, const std::string& where = "");

// Reads one record per line (blank lines skipped) and validates each.
// ParseError / ValidationError abort the import with nothing returned;
// IoError if the file cannot be read.
std::vector<EigenformRecord> import_qexp(const std::string& path);

// Cache root resolution: explicit override (CLI flag), else the
// HECKELAB_CACHE_DIR environment variable, else "./cache".
void set_cache_root(const std::string& dir);  // empty string clears the override
std::string cache_root();

// Atomic write (temp file + rename) to <root>/<label>.rec; returns the path.
std::string cache_put(const EigenformRecord& rec);
// NotFound if no record with this label is cached.
EigenformRecord cache_get(const std::string& label);

// In-memory collection with unique labels, indexed by (level, weight).
class Dataset {
public:
    void add(EigenformRecord rec);  // UsageError on duplicate label
    const EigenformRecord* find(const std::string& label) const;
    std::vector<const EigenformRecord*> at_level_weight(long level, long weight) const;
    const std::vector<EigenformRecord>& records() const { return records_; }

private:
    std::vector<EigenformRecord> records_;
    std::map<std::string, size_t> by_label_;
    std::map<std::pair<long, long>, std::vector<size_t>> by_lw_;
};

}  // namespace heckelab
