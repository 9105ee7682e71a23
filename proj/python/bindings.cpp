#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hallucorrect/chunking.h"
#include "hallucorrect/dataset.h"
#include "hallucorrect/embedding.h"
#include "hallucorrect/geval.h"
#include "hallucorrect/html_extract.h"
#include "hallucorrect/metrics.h"
#include "hallucorrect/nli.h"
#include "hallucorrect/pipeline.h"
#include "hallucorrect/prompts.h"
#include "hallucorrect/report.h"
#include "hallucorrect/serialize.h"
#include "hallucorrect/text_util.h"

namespace py = pybind11;
using namespace hallucorrect;

namespace {

// Values cross the boundary as JSON text through Python's json module.
py::object to_py(const nlohmann::json& j) { return py::module_::import("json").attr("loads")(to_text(j)); }

nlohmann::json from_py(const py::handle& obj) {
  auto text = py::module_::import("json").attr("dumps")(obj).cast<std::string>();
  return parse_json(text);
}

template <typename T>
T from_py_as(const py::handle& obj) {
  try {
    return from_py(obj).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, e.what());
  }
}

py::dict run_pipeline_py(const py::dict& record, const py::dict& config, const py::function& complete) {
  auto rec = from_py_as<SummaryRecord>(record);
  auto cfg = from_py_as<PipelineConfig>(config);
  auto gateway = std::make_shared<LlmGateway>(GatewayOptions{std::nullopt, false, {}, 1});
  gateway->register_backend(cfg.llm_backend, std::make_shared<FunctionBackend>([complete](const CompletionRequest& r) {
                              py::gil_scoped_acquire gil;
                              return complete(r.prompt).cast<std::string>();
                            }));
  CorrectionPipeline pipeline(gateway, nullptr);
  RefinedResponse response;
  {
    py::gil_scoped_release release;
    response = pipeline.run_pipeline(rec, cfg);
  }
  return to_py(nlohmann::json(response));
}

}  // namespace

PYBIND11_MODULE(_hallucorrect, m) {
  m.doc() = "Native core of the hallucorrect package";

  static py::exception<Error> error_type(m, "HallucorrectError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = py::reinterpret_borrow<py::object>(error_type.ptr())(py::str(e.what()));
      err.attr("code") = to_string(e.code());
      PyErr_SetObject(error_type.ptr(), err.ptr());
    }
  });

  m.def("ned", [](const std::string& a, const std::string& b) { return ned(a, b); });
  m.def("pearson", [](const std::vector<double>& xs, const std::vector<double>& ys) { return pearson(xs, ys); });
  m.def("alignment_report", [](const std::map<std::string, double>& human, const std::map<std::string, double>& geval) {
    py::list out;
    for (const auto& row : alignment_report(human, geval)) {
      out.append(py::dict(py::arg("method") = row.method, py::arg("human") = row.human, py::arg("geval") = row.geval,
                          py::arg("diff") = row.diff));
    }
    return out;
  });
  m.def("semantic_similarity", [](const std::string& a, const std::string& b, std::size_t dimension) {
    HashingEmbedder embedder(dimension);
    return semantic_similarity(embedder, a, b);
  }, py::arg("a"), py::arg("b"), py::arg("dimension") = 512);
  m.def("nli_scores", [](const std::string& generated, const std::string& reference) {
    LexicalNliProvider nli;
    auto r = nli_scores(nli, generated, reference);
    return py::dict(py::arg("entailment") = r.triple.entailment, py::arg("neutral") = r.triple.neutral,
                    py::arg("contradiction") = r.triple.contradiction,
                    py::arg("premise_truncated") = r.premise_truncated);
  });
  m.def("parse_judge_score", [](const std::string& reply) { return parse_judge_score(reply); });
  m.def("normalize_judge_score", &normalize_judge_score);

  m.def("chunk_text", [](const std::string& text, int size, int overlap) {
    std::vector<std::string> out;
    for (auto& c : chunk_text(text, size, overlap)) out.push_back(std::move(c.text));
    return out;
  }, py::arg("text"), py::arg("chunk_size") = 256, py::arg("overlap") = 64);
  m.def("extract_article_text", [](const std::string& html) { return extract_article_text(html); });
  m.def("parse_numbered_list", [](const std::string& text) { return parse_numbered_list(text); });
  m.def("render_prompt", [](const std::string& name, const std::map<std::string, std::string>& bindings) {
    return render(parse_template_id(name), Bindings(bindings.begin(), bindings.end()));
  });

  m.def("load_summedits", [](const std::string& path, std::optional<std::string> domain) {
    auto r = load_summedits(path, domain);
    py::list malformed;
    for (const auto& row : r.malformed) malformed.append(py::make_tuple(row.row, row.message));
    return py::dict(py::arg("records") = to_py(nlohmann::json(r.records)), py::arg("malformed") = malformed,
                    py::arg("rows_read") = r.rows_read, py::arg("filtered_out") = r.filtered_out);
  }, py::arg("path"), py::arg("domain") = std::optional<std::string>("news"));

  m.def("run_pipeline", &run_pipeline_py, py::arg("record"), py::arg("config"), py::arg("complete"),
        "Runs one record through the correction workflow with `complete(prompt) -> str` as the model.");

  m.def("aggregate", [](const py::list& reports) {
    return to_py(nlohmann::json(aggregate(from_py_as<std::vector<MetricReport>>(reports))));
  });
  m.def("render_table", [](const py::list& rows, const std::string& format) {
    return render_table(from_py_as<std::vector<AggregateRow>>(rows), parse_table_format(format));
  }, py::arg("rows"), py::arg("format") = "text");
}
