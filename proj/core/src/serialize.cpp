#include "butterfly/serialize.hpp"

#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace butterfly {

using json = nlohmann::json;

namespace {

json complex_to_json(const Cx& c) { return json::array({c.real(), c.imag()}); }

Cx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::runtime_error("expected [re, im]");
  return Cx{j[0].get<double>(), j[1].get<double>()};
}

json diag_to_json(const std::vector<Cx>& d) {
  json arr = json::array();
  for (const Cx& e : d) arr.push_back(complex_to_json(e));
  return arr;
}

std::vector<Cx> diag_from_json(const json& j) {
  std::vector<Cx> out;
  out.reserve(j.size());
  for (const json& e : j) out.push_back(complex_from_json(e));
  return out;
}

std::string field_name(Field f) { return f == Field::Real ? "real" : "complex"; }

Field field_from(const std::string& s) {
  if (s == "real") return Field::Real;
  if (s == "complex") return Field::Complex;
  throw std::runtime_error("unknown field: " + s);
}

json stack_to_obj(const ButterflyStack& stack) {
  json levels = json::array();
  for (std::size_t i = 0; i < stack.num_levels(); ++i) {
    const ButterflyLevel& lvl = stack.level(i);
    levels.push_back({{"j", i + 1},
                      {"D1", diag_to_json(lvl.d1)},
                      {"D2", diag_to_json(lvl.d2)},
                      {"D3", diag_to_json(lvl.d3)},
                      {"D4", diag_to_json(lvl.d4)}});
  }
  return {{"N", stack.size()}, {"field", field_name(stack.field())}, {"levels", levels}};
}

ButterflyStack stack_from_obj(const json& j) {
  const std::size_t n = j.at("N").get<std::size_t>();
  const Field field = field_from(j.at("field").get<std::string>());
  std::vector<ButterflyLevel> levels;
  for (const json& lj : j.at("levels")) {
    ButterflyLevel lvl;
    lvl.d1 = diag_from_json(lj.at("D1"));
    lvl.d2 = diag_from_json(lj.at("D2"));
    lvl.d3 = diag_from_json(lj.at("D3"));
    lvl.d4 = diag_from_json(lj.at("D4"));
    levels.push_back(std::move(lvl));
  }
  return ButterflyStack::from_levels(n, field, std::move(levels));
}

json perm_to_obj(const RelaxedPermutationStack& stack) {
  json levels = json::array();
  const std::size_t stored = stack.tied() ? 1 : stack.num_levels();
  for (std::size_t i = 0; i < stored; ++i) {
    const LevelLogits& l = stack.logits(i);
    levels.push_back({{"logit_a", l.a}, {"logit_b", l.b}, {"logit_c", l.c}});
  }
  return {{"N", stack.size()}, {"tied", stack.tied()}, {"levels", levels}};
}

RelaxedPermutationStack perm_from_obj(const json& j) {
  const std::size_t n = j.at("N").get<std::size_t>();
  const bool tied = j.at("tied").get<bool>();
  std::vector<LevelLogits> logits;
  for (const json& lj : j.at("levels"))
    logits.push_back({lj.at("logit_a").get<double>(), lj.at("logit_b").get<double>(),
                      lj.at("logit_c").get<double>()});
  return RelaxedPermutationStack::from_logits(n, tied, std::move(logits));
}

json model_to_obj(const BPProductModel& model) {
  json modules = json::array();
  for (const BPModel& mod : model.modules())
    modules.push_back({{"butterfly", stack_to_obj(mod.butterfly)},
                       {"permutation", perm_to_obj(mod.permutation)}});
  json j = {{"N", model.target_size()},
            {"r", model.expansion()},
            {"field", field_name(model.field())},
            {"post_real_part", model.post_real_part()},
            {"modules", modules}};
  j["extra_permutation"] =
      model.extra_input_perm() ? perm_to_obj(*model.extra_input_perm()) : json(nullptr);
  return j;
}

BPProductModel model_from_obj(const json& j) {
  const std::size_t n = j.at("N").get<std::size_t>();
  const std::size_t r = j.at("r").get<std::size_t>();
  const Field field = field_from(j.at("field").get<std::string>());
  const bool post_real = j.at("post_real_part").get<bool>();
  std::vector<BPModel> modules;
  for (const json& mj : j.at("modules")) {
    BPModel mod;
    mod.butterfly = stack_from_obj(mj.at("butterfly"));
    mod.permutation = perm_from_obj(mj.at("permutation"));
    modules.push_back(std::move(mod));
  }
  std::optional<RelaxedPermutationStack> extra;
  if (j.contains("extra_permutation") && !j.at("extra_permutation").is_null())
    extra = perm_from_obj(j.at("extra_permutation"));
  return BPProductModel::from_parts(n, r, field, post_real, std::move(modules),
                                    std::move(extra));
}

json hardened_to_obj(const HardenedInfo& info) {
  json stacks = json::array();
  for (const RelaxedPermutationStack::Hardened& h : info.stacks) {
    json choices = json::array();
    for (const PermChoice& c : h.choices)
      choices.push_back(
          {{"a", c.even_odd}, {"b", c.reverse_first}, {"c", c.reverse_second}});
    stacks.push_back({{"permutation", h.permutation.map},
                      {"choices", choices},
                      {"max_rounding_distance", h.max_rounding_distance}});
  }
  return {{"max_rounding_distance", info.max_rounding_distance}, {"stacks", stacks}};
}

json trace_to_obj(const std::vector<TraceEntry>& trace) {
  json arr = json::array();
  for (const TraceEntry& t : trace)
    arr.push_back({{"step", t.step}, {"objective", t.objective}, {"rmse", t.rmse}});
  return arr;
}

json train_result_to_obj(const TrainResult& result, bool include_model) {
  json j = {{"final_rmse", result.final_rmse},
            {"steps_used", result.steps_used},
            {"diverged", result.diverged},
            {"early_stopped", result.early_stopped},
            {"lr", result.lr},
            {"init_seed", result.init_seed},
            {"tie_logits", result.tie_logits},
            {"wall_seconds", result.wall_seconds},
            {"hardened", hardened_to_obj(result.hardened)},
            {"trace", trace_to_obj(result.trace)}};
  if (include_model) j["model"] = model_to_obj(result.model);
  return j;
}

}  // namespace

std::string stack_to_json(const ButterflyStack& stack) {
  return stack_to_obj(stack).dump(2);
}

ButterflyStack stack_from_json(const std::string& text) {
  return stack_from_obj(json::parse(text));
}

std::string perm_to_json(const RelaxedPermutationStack& stack) {
  return perm_to_obj(stack).dump(2);
}

RelaxedPermutationStack perm_from_json(const std::string& text) {
  return perm_from_obj(json::parse(text));
}

std::string model_to_json(const BPProductModel& model) {
  return model_to_obj(model).dump(2);
}

BPProductModel model_from_json(const std::string& text) {
  return model_from_obj(json::parse(text));
}

std::string train_result_to_json(const TrainResult& result, bool include_model) {
  return train_result_to_obj(result, include_model).dump(2);
}

std::string search_result_to_json(const SearchResult& result, bool include_model) {
  json trials = json::array();
  for (const TrialRecord& t : result.trials)
    trials.push_back({{"index", t.index},
                      {"lr", t.lr},
                      {"tie_logits", t.tie_logits},
                      {"init_seed", t.init_seed},
                      {"phase1_rmse", t.phase1_rmse},
                      {"final_rmse", t.final_rmse},
                      {"steps_used", t.steps_used},
                      {"survived", t.survived},
                      {"diverged", t.diverged},
                      {"early_stopped", t.early_stopped}});
  json j = {{"best_trial", result.best_trial},
            {"wall_seconds", result.wall_seconds},
            {"trials", trials},
            {"best", train_result_to_obj(result.best, include_model)}};
  return j.dump(2);
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string verify_report_to_csv(const VerifyReport& report) {
  std::string out = "transform,N,max_abs_error,passed\n";
  for (const VerifyRow& r : report.rows) {
    out += r.transform;
    out += ',' + std::to_string(r.n);
    out += ',' + format_double(r.max_abs_error);
    out += ',';
    out += r.passed ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::string trial_records_to_csv(const std::vector<TrialRecord>& records) {
  std::string out =
      "trial,lr,tie_logits,init_seed,phase1_rmse,final_rmse,steps_used,survived,"
      "diverged,early_stopped\n";
  for (const TrialRecord& t : records) {
    out += std::to_string(t.index);
    out += ',' + format_double(t.lr);
    out += ',';
    out += t.tie_logits ? "true" : "false";
    out += ',' + std::to_string(t.init_seed);
    out += ',' + format_double(t.phase1_rmse);
    out += ',' + format_double(t.final_rmse);
    out += ',' + std::to_string(t.steps_used);
    out += ',';
    out += t.survived ? "true" : "false";
    out += ',';
    out += t.diverged ? "true" : "false";
    out += ',';
    out += t.early_stopped ? "true" : "false";
    out += '\n';
  }
  return out;
}

std::string trace_to_csv(const std::vector<TraceEntry>& trace) {
  std::string out = "step,objective,rmse\n";
  for (const TraceEntry& t : trace) {
    out += std::to_string(t.step);
    out += ',' + format_double(t.objective);
    out += ',' + format_double(t.rmse);
    out += '\n';
  }
  return out;
}

}  // namespace butterfly
