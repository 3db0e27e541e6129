#pragma once

#include <string>
#include <vector>

#include "butterfly/butterfly_stack.hpp"
#include "butterfly/exact.hpp"
#include "butterfly/model.hpp"
#include "butterfly/permutation.hpp"
#include "butterfly/train.hpp"

namespace butterfly {

// JSON round-trips are value-exact: doubles are emitted with shortest
// round-trip precision and parse back bit-identically.

std::string stack_to_json(const ButterflyStack& stack);
ButterflyStack stack_from_json(const std::string& text);

std::string perm_to_json(const RelaxedPermutationStack& stack);
RelaxedPermutationStack perm_from_json(const std::string& text);

std::string model_to_json(const BPProductModel& model);
BPProductModel model_from_json(const std::string& text);

std::string train_result_to_json(const TrainResult& result, bool include_model = true);
std::string search_result_to_json(const SearchResult& result, bool include_model = true);

// CSV emitters (fixed headers, %.17g numerics, deterministic byte-for-byte).
std::string verify_report_to_csv(const VerifyReport& report);
std::string trial_records_to_csv(const std::vector<TrialRecord>& records);
std::string trace_to_csv(const std::vector<TraceEntry>& trace);

// Shared numeric formatting for every CSV/report writer.
std::string format_double(double v);

}  // namespace butterfly
