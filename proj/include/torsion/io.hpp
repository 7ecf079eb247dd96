#pragma once
// System files and run reports.
//
// A system file is a UTF-8 JSON document:
//   {
//     "rank": 2,
//     "split": true,
//     "elements": [
//       {"kind": "fixed", "id": "p0", "index": 1, "gram": [[...], ...]},
//       {"kind": "orbit", "id": "g0", "index": 0, "period": 1.0,
//        "twist": -1, "holonomy": [[...], ...],
//        "reverse_orientation": false}
//     ],
//     "chain_model": {"dims": [...], "differentials": [matrix, ...],
//                     "levels": [[...], ...]},            // optional
//     "surgery": {"g0": {"tau": matrix, "n_a": 1, "n_a_prime": 1,
//                        "gram_x": matrix, "gram_x_prime": matrix}}  // optional
//   }
// Matrices are row-major nested arrays; a complex entry is an [re, im] pair
// and a bare number is accepted as a real entry. Parsing validates the
// schema and every system-level invariant, naming the offending field or
// constraint. Serialization is canonical (fixed key order, entries always
// as [re, im]), so parse -> serialize is a round trip.
//
// Reports carry a command name, a digest of the canonical input, ordered
// key/value fields, and a pass flag; rendering is byte-deterministic, with
// floats at 17 significant digits and RFC-4180 CSV.

#include "torsion/flow.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace torsion {

struct SystemFile {
  MorseSmaleSystem system;
  SurgeryMap surgery;  // empty when the file has none
};

SystemFile parse_system_text(const std::string& text,
                             double tol = kDefaultTol);
SystemFile load_system_file(const std::string& path, double tol = kDefaultTol);
// The system alone; surgery data in the file is validated, then dropped.
MorseSmaleSystem parse_system(const std::string& path,
                              double tol = kDefaultTol);

std::string serialize_system(const SystemFile& file);

// %.17g
std::string format_float(double x);

// FNV-1a (64-bit) of the canonical serialization, as 16 hex digits.
std::uint64_t fnv1a64(const std::string& bytes);
std::string digest_hex(const std::string& bytes);

struct RunReport {
  std::string command;
  std::string input_digest;
  double tol = kDefaultTol;
  bool pass = true;
  std::vector<std::pair<std::string, std::string>> fields;

  void add(const std::string& key, std::string value);
  void add(const std::string& key, double value);
  void add(const std::string& key, int value);

  // {"command":..., "input_digest":..., "tol":..., "pass":...,
  //  "fields": {...}} with fields in insertion order.
  std::string to_json() const;
  // RFC-4180, header "key,value", CRLF line endings.
  std::string to_csv() const;
};

// Quote a CSV field per RFC-4180 when it contains a comma, quote, or line
// break.
std::string csv_field(const std::string& raw);

}  // namespace torsion
