#include "cnsdist/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cnsdist/cns.hpp"
#include "cnsdist/error.hpp"
#include "cnsdist/graph.hpp"
#include "cnsdist/linkpred.hpp"
#include "json.hpp"

namespace cnsdist::cli {

using nlohmann::ordered_json;

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <class T>
T need(const std::optional<T>& v, const char* flag, std::string_view kind) {
  if (!v) throw UsageError(std::string("model '") + std::string(kind) + "' needs --" + flag);
  return *v;
}

ordered_json descriptor_json(const ModelDescriptor& d) {
  ordered_json j = ordered_json::object();
  if (d.kind) j["kind"] = *d.kind;
  if (d.n) j["n"] = *d.n;
  if (d.m) j["m"] = *d.m;
  if (d.p) j["p"] = *d.p;
  if (d.k) j["k"] = *d.k;
  if (d.eta) j["eta"] = *d.eta;
  if (d.alpha) j["alpha"] = *d.alpha;
  if (d.m0) j["m0"] = *d.m0;
  return j;
}

template <class T>
void read_opt(const ordered_json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

ModelDescriptor descriptor_from_json(const ordered_json& j) {
  ModelDescriptor d;
  read_opt(j, "kind", d.kind);
  read_opt(j, "n", d.n);
  read_opt(j, "m", d.m);
  read_opt(j, "p", d.p);
  read_opt(j, "k", d.k);
  read_opt(j, "eta", d.eta);
  read_opt(j, "alpha", d.alpha);
  read_opt(j, "m0", d.m0);
  return d;
}

void merge(ModelDescriptor& base, const ModelDescriptor& over) {
  if (over.kind) base.kind = over.kind;
  if (over.n) base.n = over.n;
  if (over.m) base.m = over.m;
  if (over.p) base.p = over.p;
  if (over.k) base.k = over.k;
  if (over.eta) base.eta = over.eta;
  if (over.alpha) base.alpha = over.alpha;
  if (over.m0) base.m0 = over.m0;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw InputError("failed writing " + path.string());
}

std::string compact_config(const RunConfig& c) { return ordered_json::parse(to_json(c)).dump(); }

void write_comment_header(std::ostream& out, const RunConfig& c) {
  out << "# format_version " << kFormatVersion << '\n';
  out << "# config " << compact_config(c) << '\n';
}

ordered_json envelope(const RunConfig& c) {
  ordered_json j;
  j["format_version"] = kFormatVersion;
  j["config"] = ordered_json::parse(to_json(c));
  return j;
}

std::uint64_t need_seed(const RunConfig& c, const char* what) {
  if (!c.seed) throw UsageError(std::string(what) + " draws random numbers; pass --seed");
  return *c.seed;
}

// ---- generate ----------------------------------------------------------------

int cmd_generate(const RunConfig& c, std::ostream& out) {
  if (!c.model) throw UsageError("generate needs a model (--model or --config)");
  if (c.input) throw UsageError("generate takes a model, not --input");
  const ProbModel model = build_model(*c.model);
  std::uint64_t seed = 0;
  if (model.kind() != ModelKind::rrl) seed = need_seed(c, "sampling this model");
  if (c.output.empty()) throw UsageError("generate needs --out");

  const Graph g = sample_graph(model, seed);
  const std::filesystem::path path(c.output);
  {
    auto f = open_out(path);
    write_comment_header(f, c);
    f << "# nodes " << g.node_count() << " edges " << g.edge_count() << '\n';
    write_edge_list(f, g);
    close_out(f, path);
  }
  ordered_json side = envelope(c);
  side["nodes"] = g.node_count();
  side["edges"] = g.edge_count();
  side["mean_degree"] = g.mean_degree();
  const std::filesystem::path side_path(c.output + ".json");
  auto f = open_out(side_path);
  f << side.dump(2) << '\n';
  close_out(f, side_path);
  out << "wrote " << g.edge_count() << " edges on " << g.node_count() << " nodes to " << c.output
      << '\n';
  return kOk;
}

// ---- cns ---------------------------------------------------------------------

ordered_json summary(const ClassCondDistributions& d, bool all_only) {
  ordered_json s;
  s["q"] = d.q;
  auto describe = [](const std::optional<Pmf>& p) {
    ordered_json e;
    if (!p) return ordered_json();
    e["mean"] = p->mean();
    e["variance"] = p->variance();
    e["median"] = p->median();
    return e;
  };
  if (!all_only) {
    s["chi_c"] = d.chi_c;
    s["p_c"] = describe(d.p_c);
    s["p_d"] = describe(d.p_d);
  }
  s["p_a"] = describe(std::optional<Pmf>(d.p_a));
  if (!all_only && d.p_c && d.p_d)
    s["mixture_residual"] = d.mixture_residual();
  else if (!all_only)
    s["mixture_residual"] = nullptr;
  return s;
}

void write_pmf_file(const std::filesystem::path& path, const Pmf& p, const RunConfig& c) {
  auto f = open_out(path);
  write_comment_header(f, c);
  write_pmf_csv(f, p);
  close_out(f, path);
}

void emit_csvs(const std::filesystem::path& dir, const std::string& prefix,
               const ClassCondDistributions& d, const RunConfig& c) {
  if (!c.all_only) {
    if (d.p_c) write_pmf_file(dir / (prefix + "p_c.csv"), *d.p_c, c);
    if (d.p_d) write_pmf_file(dir / (prefix + "p_d.csv"), *d.p_d, c);
  }
  write_pmf_file(dir / (prefix + "p_a.csv"), d.p_a, c);
}

ordered_json distributions_json(const ClassCondDistributions& d, bool all_only) {
  ordered_json j = ordered_json::parse(to_json(d, -1));
  if (all_only) {
    j.erase("p_c");
    j.erase("p_d");
    j.erase("chi_c");
  }
  return j;
}

int cmd_cns(const RunConfig& c, std::ostream& out) {
  if (c.mode != "analytic" && c.mode != "empirical" && c.mode != "both")
    throw UsageError("--mode must be analytic, empirical or both");
  if (c.q < 1) throw UsageError("--q must be at least 1");
  if (c.q < 2 && !c.all_only)
    throw UsageError("q < 2 has no linked/unlinked split; pass --all-only for p_a alone");
  if (c.model && c.input) throw UsageError("give either a model or --input, not both");
  if (c.output.empty()) throw UsageError("cns needs --out (a directory)");
  if (c.format != "csv" && c.format != "json") throw UsageError("--format must be csv or json");

  const bool want_analytic = c.mode != "empirical";
  const bool want_empirical = c.mode != "analytic";
  if (want_analytic && !c.model) throw UsageError("analytic mode needs a model descriptor");
  if (c.mode == "empirical" && !c.input) throw UsageError("empirical mode needs --input");

  std::optional<ClassCondDistributions> analytic, empirical;
  if (want_analytic) {
    const ProbModel model = build_model(*c.model);
    AnalyticOptions opt;
    opt.q = c.q;
    opt.mode = c.sampled ? SetEnumeration::sampled : SetEnumeration::exact;
    opt.sample_count = c.samples;
    opt.threads = c.threads;
    if (c.sampled) opt.seed = need_seed(c, "sampled mode");
    analytic = class_distributions_analytic(model, opt);
  }
  if (want_empirical) {
    Graph g;
    if (c.input) {
      g = load_edge_list_file(*c.input).graph;
    } else {
      const ProbModel model = build_model(*c.model);
      g = sample_graph(model, model.kind() == ModelKind::rrl ? c.seed.value_or(0)
                                                              : need_seed(c, "sampling a graph"));
    }
    EmpiricalOptions opt;
    opt.q = c.q;
    opt.sample_count = c.samples;
    if (c.q >= 3) opt.seed = need_seed(c, "empirical q >= 3");
    empirical = empirical_class_distributions(g, opt);
  }

  ordered_json results = ordered_json::object();
  if (analytic) results["analytic"] = summary(*analytic, c.all_only);
  if (empirical) results["empirical"] = summary(*empirical, c.all_only);
  if (analytic && empirical) {
    ordered_json tv;
    auto gap = [](const std::optional<Pmf>& a, const std::optional<Pmf>& b) {
      return a && b ? ordered_json(total_variation(*a, *b)) : ordered_json();
    };
    if (!c.all_only) {
      tv["p_c"] = gap(analytic->p_c, empirical->p_c);
      tv["p_d"] = gap(analytic->p_d, empirical->p_d);
    }
    tv["p_a"] = total_variation(analytic->p_a, empirical->p_a);
    results["total_variation"] = tv;
  }

  const std::filesystem::path dir(c.output);
  std::filesystem::create_directories(dir);
  ordered_json doc = envelope(c);
  doc["results"] = results;
  if (c.format == "csv") {
    const bool both = analytic && empirical;
    if (analytic) emit_csvs(dir, both ? "analytic_" : "", *analytic, c);
    if (empirical) emit_csvs(dir, both ? "empirical_" : "", *empirical, c);
    const auto path = dir / "summary.json";
    auto f = open_out(path);
    f << doc.dump(2) << '\n';
    close_out(f, path);
  } else {
    ordered_json dists;
    if (analytic) dists["analytic"] = distributions_json(*analytic, c.all_only);
    if (empirical) dists["empirical"] = distributions_json(*empirical, c.all_only);
    doc["distributions"] = dists;
    const auto path = dir / "distributions.json";
    auto f = open_out(path);
    f << doc.dump(2) << '\n';
    close_out(f, path);
  }
  out << results.dump(2) << '\n';
  return kOk;
}

// ---- evaluate ----------------------------------------------------------------

int cmd_evaluate(const RunConfig& c, std::ostream& out) {
  if (c.model && c.input) throw UsageError("give either a model or --input, not both");
  if (!c.model && !c.input) throw UsageError("evaluate needs --input or a model descriptor");
  if (c.format != "json" && c.format != "text") throw UsageError("--format must be json or text");
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw UsageError("--eps must lie in (0,1)");
  for (const auto& name : c.indices) {
    try {
      (void)parse_index(name);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  Graph g;
  if (c.input) {
    g = load_edge_list_file(*c.input).graph;
  } else {
    const ProbModel model = build_model(*c.model);
    g = sample_graph(model, model.kind() == ModelKind::rrl ? c.seed.value_or(0)
                                                            : need_seed(c, "sampling a graph"));
  }

  EvaluateOptions opt;
  opt.indices = c.indices;
  opt.split.epsilon = c.epsilon;
  opt.split.repetitions = c.repetitions;
  opt.comparisons = c.comparisons;
  opt.L = c.L;
  opt.theory_only = c.theory_only;
  opt.lp_phi = c.lp_phi;
  opt.katz_phi = c.katz_phi;
  opt.threads = c.threads;
  if (!c.theory_only) opt.split.seed = need_seed(c, "the split protocol");

  const EvalReport report = evaluate(g, opt);
  const std::string table = to_text_table(report);
  if (c.output.empty()) {
    out << table;
    return kOk;
  }
  const std::filesystem::path path(c.output);
  auto f = open_out(path);
  if (c.format == "json") {
    ordered_json doc = envelope(c);
    doc["report"] = ordered_json::parse(to_json(report));
    f << doc.dump(2) << '\n';
  } else {
    write_comment_header(f, c);
    f << table;
  }
  close_out(f, path);
  out << table;
  return kOk;
}

// ---- flag plumbing -----------------------------------------------------------

struct Flags {
  std::optional<std::string> config;
  ModelDescriptor model;
  std::optional<std::string> input, output, format, mode;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> q, samples, reps, comparisons, L;
  std::optional<double> eps, lp_phi, katz_phi;
  std::optional<unsigned> threads;
  std::vector<std::string> indices;
  bool all_only = false, sampled = false, theory_only = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON run config or model descriptor");
  sub->add_option("--seed", f.seed, "seed for every random draw");
  sub->add_option("-o,--out", f.output, "output path");
  sub->add_option("--threads", f.threads, "worker threads (default 1)")->check(CLI::PositiveNumber);
}

void add_model(CLI::App* sub, Flags& f) {
  sub->add_option("--model", f.model.kind, "rrl | mrl | er | ws | nw | unified | ba");
  sub->add_option("--n", f.model.n, "number of nodes");
  sub->add_option("--m", f.model.m, "ring half-width or links per arriving node");
  sub->add_option("--p", f.model.p, "deletion / rewiring / addition probability");
  sub->add_option("--k", f.model.k, "mean degree");
  sub->add_option("--eta", f.model.eta, "link probability within ring distance m");
  sub->add_option("--alpha", f.model.alpha, "link probability beyond ring distance m");
  sub->add_option("--m0", f.model.m0, "initial clique size (ba)");
}

RunConfig resolve(const std::string& command, const Flags& f) {
  RunConfig c;
  if (f.config) {
    try {
      c = run_config_from_json(read_file(*f.config));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad config file: ") + e.what(), 0);
    }
  }
  c.command = command;
  if (c.format.empty() || (command == "generate" && c.format != "edges") ||
      (command == "cns" && c.format != "csv" && c.format != "json") ||
      (command == "evaluate" && c.format != "json" && c.format != "text"))
    c.format = command == "generate" ? "edges" : command == "cns" ? "csv" : "json";

  const ModelDescriptor& m = f.model;
  if (m.kind || m.n || m.m || m.p || m.k || m.eta || m.alpha || m.m0) {
    if (!c.model) c.model = ModelDescriptor{};
    merge(*c.model, m);
  }
  if (f.input) c.input = f.input;
  if (f.output) c.output = *f.output;
  if (f.format) c.format = *f.format;
  if (f.mode) c.mode = *f.mode;
  if (f.seed) c.seed = f.seed;
  if (f.q) c.q = *f.q;
  if (f.samples) c.samples = *f.samples;
  if (f.reps) c.repetitions = *f.reps;
  if (f.comparisons) c.comparisons = *f.comparisons;
  if (f.L) c.L = *f.L;
  if (f.eps) c.epsilon = *f.eps;
  if (f.lp_phi) c.lp_phi = *f.lp_phi;
  if (f.katz_phi) c.katz_phi = *f.katz_phi;
  if (f.threads) c.threads = *f.threads;
  if (!f.indices.empty()) c.indices = f.indices;
  if (f.all_only) c.all_only = true;
  if (f.sampled) c.sampled = true;
  if (f.theory_only) c.theory_only = true;
  return c;
}

}  // namespace

ProbModel build_model(const ModelDescriptor& d) {
  if (!d.kind) throw UsageError("no model kind given (--model)");
  ModelKind kind;
  try {
    kind = parse_model_kind(*d.kind);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const std::string_view name = *d.kind;
  try {
    const std::size_t n = need(d.n, "n", name);
    switch (kind) {
      case ModelKind::rrl: return ProbModel::rrl(n, need(d.m, "m", name));
      case ModelKind::mrl: return ProbModel::mrl(n, need(d.m, "m", name), need(d.p, "p", name));
      case ModelKind::er: return ProbModel::er(n, need(d.k, "k", name));
      case ModelKind::ws: return ProbModel::ws(n, need(d.m, "m", name), need(d.p, "p", name));
      case ModelKind::nw: return ProbModel::nw(n, need(d.m, "m", name), need(d.p, "p", name));
      case ModelKind::unified:
        return ProbModel::unified(n, need(d.m, "m", name), need(d.eta, "eta", name),
                                  need(d.alpha, "alpha", name));
      case ModelKind::ba: {
        std::size_t m;
        if (d.m) {
          m = *d.m;
        } else {
          const double k = need(d.k, "m (or --k)", name);
          if (!(k >= 2.0)) throw UsageError("ba needs --k >= 2");
          m = static_cast<std::size_t>(std::llround(k / 2.0));
        }
        return ProbModel::ba(n, m, d.m0.value_or(m));
      }
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  throw UsageError("unsupported model");
}

std::string to_json(const RunConfig& c) {
  ordered_json j;
  j["command"] = c.command;
  j["model"] = c.model ? descriptor_json(*c.model) : ordered_json();
  j["input"] = c.input ? ordered_json(*c.input) : ordered_json();
  j["seed"] = c.seed ? ordered_json(*c.seed) : ordered_json();
  j["output"] = c.output;
  j["format"] = c.format;
  if (c.command == "cns") {
    j["q"] = c.q;
    j["mode"] = c.mode;
    j["all_only"] = c.all_only;
    j["sampled"] = c.sampled;
    j["samples"] = c.samples;
  }
  if (c.command == "evaluate") {
    j["indices"] = c.indices;
    j["epsilon"] = c.epsilon;
    j["repetitions"] = c.repetitions;
    j["comparisons"] = c.comparisons;
    j["L"] = c.L;
    j["theory_only"] = c.theory_only;
    j["lp_phi"] = c.lp_phi;
    j["katz_phi"] = c.katz_phi;
  }
  j["threads"] = c.threads;
  return j.dump(2);
}

RunConfig run_config_from_json(const std::string& text) {
  ordered_json j = ordered_json::parse(text);
  if (j.contains("config") && j.at("config").is_object()) j = j.at("config");  // emitted sidecar
  if (!j.is_object()) throw ParseError("config must be a JSON object", 0);
  RunConfig c;
  if (j.contains("kind")) {
    c.model = descriptor_from_json(j);
    read_opt(j, "seed", c.seed);
    return c;
  }
  if (j.contains("model") && j.at("model").is_object()) c.model = descriptor_from_json(j.at("model"));
  read_opt(j, "input", c.input);
  read_opt(j, "seed", c.seed);
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key) && !j.at(key).is_null()) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("command", c.command);
  get("output", c.output);
  get("format", c.format);
  get("q", c.q);
  get("mode", c.mode);
  get("all_only", c.all_only);
  get("sampled", c.sampled);
  get("samples", c.samples);
  get("indices", c.indices);
  get("epsilon", c.epsilon);
  get("repetitions", c.repetitions);
  get("comparisons", c.comparisons);
  get("L", c.L);
  get("theory_only", c.theory_only);
  get("lp_phi", c.lp_phi);
  get("katz_phi", c.katz_phi);
  get("threads", c.threads);
  return c;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Common-neighbor similarity distributions and link prediction accuracy", "cnsdist"};
  app.require_subcommand(1, 1);
  Flags f;

  auto* gen = app.add_subcommand("generate", "sample a graph from a model and write its edge list");
  add_common(gen, f);
  add_model(gen, f);

  auto* cns = app.add_subcommand("cns", "CNS distributions of linked, unlinked and all node sets");
  add_common(cns, f);
  add_model(cns, f);
  cns->add_option("--input", f.input, "edge list (empirical mode)");
  cns->add_option("--mode", f.mode, "analytic | empirical | both");
  cns->add_option("--q", f.q, "node-set size (default 2)");
  cns->add_option("--samples", f.samples, "sets drawn when sampling");
  cns->add_flag("--sampled", f.sampled, "draw node sets instead of enumerating them");
  cns->add_flag("--all-only", f.all_only, "emit only the all-sets distribution");
  cns->add_option("--format", f.format, "csv | json");

  auto* ev = app.add_subcommand("evaluate", "experimental and theoretical AUC / Precision");
  add_common(ev, f);
  add_model(ev, f);
  ev->add_option("--input", f.input, "edge list");
  ev->add_option("--indices", f.indices, "comma list of cn, ra, aa, lp, katz, katz-shifted")
      ->delimiter(',');
  ev->add_option("--eps", f.eps, "fraction of links in the test set (default 0.1)");
  ev->add_option("--reps", f.reps, "split repetitions (default 100)");
  ev->add_option("--comparisons", f.comparisons, "AUC comparisons per repetition (default 10000)");
  ev->add_option("--L", f.L, "Precision cut-off (default: test set size)");
  ev->add_flag("--theory-only", f.theory_only, "skip the split protocol");
  ev->add_option("--lp-phi", f.lp_phi, "LP weight of length-3 paths (default 0.02)");
  ev->add_option("--katz-phi", f.katz_phi, "Katz attenuation (default 0.01)");
  ev->add_option("--format", f.format, "json | text");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    const RunConfig c = resolve(command, f);
    if (command == "generate") return cmd_generate(c, out);
    if (command == "cns") return cmd_cns(c, out);
    return cmd_evaluate(c, out);
  } catch (const UsageError& e) {
    err << "cnsdist: " << e.what() << '\n';
    return kUsage;
  } catch (const NumericalError& e) {
    err << "cnsdist: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const ParseError& e) {
    err << "cnsdist: " << e.what() << '\n';
    return kInput;
  } catch (const InputError& e) {
    err << "cnsdist: " << e.what() << '\n';
    return kInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "cnsdist: " << e.what() << '\n';
    return kInput;
  } catch (const std::logic_error& e) {
    err << "cnsdist: rejected input: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    err << "cnsdist: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace cnsdist::cli
