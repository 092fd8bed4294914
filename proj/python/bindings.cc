// Copyright 2026 The kpagg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Python bindings for the kpagg core.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kpagg/aggregation.h"
#include "kpagg/corpus.h"
#include "kpagg/errors.h"
#include "kpagg/harness.h"
#include "kpagg/metrics.h"
#include "kpagg/mock_server.h"
#include "kpagg/porter_stemmer.h"
#include "kpagg/prompting.h"
#include "kpagg/sample.h"
#include "kpagg/textnorm.h"

namespace py = pybind11;

namespace {

template <typename T, typename Parse>
T ParseOrThrow(const std::string& name, Parse parse, const char* what) {
  const auto v = parse(name);
  if (!v) throw py::value_error(std::string("unknown ") + what + " '" + name + "'");
  return *v;
}

std::vector<std::string> Surfaces(const std::vector<kpagg::NormalizedPhrase>& phrases) {
  std::vector<std::string> out;
  for (const auto& p : phrases) out.push_back(p.surface);
  return out;
}

py::dict PredictionDict(const kpagg::Prediction& p) {
  py::dict d;
  d["present"] = Surfaces(p.present);
  d["absent"] = Surfaces(p.absent);
  d["m_pre"] = p.m_pre;
  d["m_abs"] = p.m_abs;
  d["ranked_present"] = Surfaces(p.ranked_present);
  d["ranked_absent"] = Surfaces(p.ranked_absent);
  return d;
}

py::dict ReportDict(const kpagg::MetricReport& r) {
  py::dict table;
  for (kpagg::Partition p : kpagg::kPartitions) {
    py::dict row;
    for (kpagg::Metric m : kpagg::kMetrics) {
      const auto& cell = r.cell(p, m);
      row[py::str(std::string(kpagg::to_string(m)))] =
          py::make_tuple(cell.value ? py::cast(*cell.value) : py::none(), cell.count);
    }
    table[py::str(std::string(kpagg::to_string(p)))] = row;
  }
  py::dict d;
  d["corpus"] = r.corpus;
  d["variant"] = r.variant;
  d["strategy"] = r.strategy;
  d["table"] = table;
  return d;
}

kpagg::Document MakeDocument(const std::string& title, const std::string& body,
                             const std::vector<std::string>& gold) {
  return {"doc", title, body, gold, kpagg::Domain::kScientific};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Keyphrase generation with multi-sample aggregation";

  // The most recently registered translator is tried first, so the base goes first.
  auto error = py::register_exception<kpagg::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<kpagg::ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<kpagg::AuthError>(m, "AuthError", error.ptr());
  py::register_exception<kpagg::CorpusError>(m, "CorpusError", error.ptr());

  m.def("porter_stem", &kpagg::porter_stem, py::arg("word"));
  m.def("normalize_tokens", &kpagg::normalize_tokens, py::arg("text"));
  m.def(
      "normalize", [](const std::string& phrase) { return kpagg::normalize_phrase(phrase).normalized; },
      py::arg("phrase"), "Stemmed, lowercased form of a keyphrase.");
  m.def(
      "is_present",
      [](const std::string& phrase, const std::string& text) {
        const auto norm = kpagg::normalize_phrase(phrase);
        if (norm.normalized.empty()) throw py::value_error("phrase has no word characters");
        return kpagg::is_present(norm, kpagg::normalize_tokens(text));
      },
      py::arg("phrase"), py::arg("text"));

  m.def(
      "parse_sample",
      [](const std::string& text, bool had_prefill) {
        const auto out = kpagg::parse_sample(text, had_prefill);
        return py::make_tuple(out.phrases, out.fallback);
      },
      py::arg("text"), py::arg("had_prefill") = false,
      "Returns (phrases, fallback_used).");
  m.def(
      "perplexity",
      [](const std::vector<double>& logprobs) { return kpagg::perplexity(logprobs); },
      py::arg("token_logprobs"));

  m.def("strategies", [] {
    std::vector<std::string> out;
    for (auto s : {kpagg::Strategy::kSingle, kpagg::Strategy::kUnion, kpagg::Strategy::kUnionConcat,
                   kpagg::Strategy::kUnionInterleaf, kpagg::Strategy::kFrequencyOrder}) {
      out.emplace_back(kpagg::to_string(s));
    }
    return out;
  });
  m.def(
      "predict",
      [](const std::vector<std::vector<std::string>>& samples,
         const std::vector<std::optional<double>>& perplexities, const std::string& title,
         const std::string& body, const std::string& strategy) {
        if (perplexities.size() != samples.size()) {
          throw py::value_error("need one perplexity (or None) per sample");
        }
        std::vector<kpagg::ParsedSample> parsed;
        for (std::size_t i = 0; i < samples.size(); ++i) parsed.push_back({samples[i], perplexities[i]});
        const auto s = ParseOrThrow<kpagg::Strategy>(strategy, kpagg::parse_strategy, "strategy");
        return PredictionDict(kpagg::predict(parsed, MakeDocument(title, body, {}), s));
      },
      py::arg("samples"), py::arg("perplexities"), py::arg("title"), py::arg("body"),
      py::arg("strategy") = "frequency",
      "Ranks samples by perplexity, aggregates them and applies dynamic selection.");

  m.def(
      "score_at_m",
      [](const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
        const auto s = kpagg::score_at_m(pred, gold);
        return py::make_tuple(s.precision, s.recall, s.f1);
      },
      py::arg("pred"), py::arg("gold"));
  m.def(
      "score_at_k",
      [](const std::vector<std::string>& pred, const std::vector<std::string>& gold, std::size_t k,
         bool pad) {
        if (k == 0) throw py::value_error("k must be at least 1");
        const auto s = kpagg::score_at_k(pred, gold, k, pad);
        return py::make_tuple(s.precision, s.recall, s.f1);
      },
      py::arg("pred"), py::arg("gold"), py::arg("k"), py::arg("pad") = true);
  m.def(
      "recall_at_inf",
      [](const std::vector<std::string>& pred, const std::vector<std::string>& gold) {
        return kpagg::recall_at_inf(pred, gold);
      },
      py::arg("all_phrases"), py::arg("gold"));

  m.def(
      "corpus_stats",
      [](const std::filesystem::path& path) {
        const auto loaded = kpagg::load_corpus(path);
        const auto s = kpagg::corpus_stats(loaded.documents);
        py::dict d;
        d["documents"] = s.documents;
        d["avg_input_words"] = s.avg_input_words;
        d["avg_words_per_present_kp"] = s.avg_words_per_present_kp;
        d["avg_words_per_absent_kp"] = s.avg_words_per_absent_kp;
        d["avg_present_per_doc"] = s.avg_present_per_doc;
        d["avg_absent_per_doc"] = s.avg_absent_per_doc;
        d["skipped_lines"] = loaded.skipped_lines;
        return d;
      },
      py::arg("path"));

  m.def(
      "build_prompt",
      [](const std::string& title, const std::string& body, const std::string& variant, bool prefill) {
        const auto v = ParseOrThrow<kpagg::PromptVariant>(variant, kpagg::parse_variant, "variant");
        const auto p = kpagg::build_prompt(MakeDocument(title, body, {}), v, prefill);
        py::dict d;
        d["system"] = p.system;
        d["user"] = p.user;
        d["assistant_prefill"] = p.assistant_prefill;
        d["prompt_hash"] = p.prompt_hash;
        return d;
      },
      py::arg("title"), py::arg("body"), py::arg("variant") = "baseline", py::arg("prefill") = false);

  m.def(
      "run",
      [](const std::string& config_json, const std::string& api_key) {
        auto config = kpagg::RunConfig::from_json(nlohmann::json::parse(config_json));
        config.api_key = api_key;
        kpagg::RunSummary summary;
        {
          py::gil_scoped_release release;
          summary = kpagg::run(config);
        }
        py::dict d;
        d["report"] = ReportDict(summary.report);
        d["counters"] = py::module_::import("json").attr("loads")(summary.counters_json().dump());
        return d;
      },
      py::arg("config_json"), py::arg("api_key") = "",
      "Runs one configuration given as a JSON string with the same keys as a grid entry.");

  py::class_<kpagg::MockChatServer>(m, "MockServer",
                                    "Fixture-driven chat-completions server on 127.0.0.1.")
      .def(py::init([](const std::string& fixture_json, std::uint64_t seed) {
             return std::make_unique<kpagg::MockChatServer>(nlohmann::json::parse(fixture_json),
                                                            seed);
           }),
           py::arg("fixture_json") = "{}", py::arg("seed") = 0)
      .def("start", &kpagg::MockChatServer::start, py::arg("port") = 0)
      .def("stop", &kpagg::MockChatServer::stop)
      .def_property_readonly("url", &kpagg::MockChatServer::url)
      .def_property_readonly("requests", &kpagg::MockChatServer::requests);
}
