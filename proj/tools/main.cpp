// smallforms: a workbench for systems of small linear forms.
//
// Exit codes: 0 on success (and on a verified certificate), 1 on any domain
// or verification failure (with a structured {"error": ...} envelope in json
// mode), 2 on usage errors.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "smallforms/errors.hpp"
#include "smallforms/lab.hpp"
#include "smallforms/reduction.hpp"
#include "smallforms/serialization.hpp"
#include "smallforms/version.hpp"

namespace sf = smallforms;

namespace {

enum class Format { JsonOut, CsvOut, HumanOut };

struct Options {
  std::string format = "json";
  int m = 0;
  int n = 0;
  std::string variant = "absolute";
  std::string psi;
  std::string f;
  std::string matrix;
  std::string window;
  std::string epsilon = "1/10";
  std::string cap = "2";
  std::string r_vector;
  std::string cert_path;
  std::string schedule;
  std::string kind;
  double tau = 0.0;
  long long samples = 100;
  std::uint64_t seed = 0;
  int jobs = 1;
  unsigned long long budget = 1'000'000'000ULL;
  double q_lo_coeff = 1.0;
  double q_span = 2.5;
  double agree_high = 0.9;
  double agree_low = 0.1;
};

Format parse_format(const std::string& name) {
  if (name == "json") return Format::JsonOut;
  if (name == "csv") return Format::CsvOut;
  if (name == "human") return Format::HumanOut;
  throw CLI::ValidationError("--format must be json, csv, or human");
}

void emit(const sf::Json& payload) { std::cout << payload.dump(2) << '\n'; }

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "usage error: " << message << '\n';
  std::exit(2);
}

sf::Rational parse_rational_flag(const std::string& text, const char* what) {
  try {
    return sf::parse_rational(text);
  } catch (const sf::Error&) {
    usage_error(std::string(what) + " must be a rational, got '" + text + "'");
  }
}

std::vector<sf::HeightWindow> parse_schedule(const std::string& text) {
  std::vector<sf::HeightWindow> windows;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    windows.push_back(sf::parse_window_literal(item));
  }
  if (windows.empty()) {
    sf::fail(sf::errkind::parse, "empty window schedule");
  }
  return windows;
}

std::vector<int> parse_scales(const std::string& text) {
  std::vector<int> ks;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    ks.push_back(static_cast<int>(std::stoll(item)));
  }
  return ks;
}

sf::ProblemSpec build_spec(const Options& opt, int m, int n) {
  return sf::ProblemSpec(m, n, sf::variant_from_name(opt.variant),
                         sf::parse_psi_literal(opt.psi));
}

// ---- subcommand bodies -----------------------------------------------------

int cmd_regime(const Options& opt, Format format) {
  std::string psi = opt.psi.empty() ? "powerlog:1,1,0" : opt.psi;
  Options with_psi = opt;
  with_psi.psi = psi;
  sf::ProblemSpec spec = build_spec(with_psi, opt.m, opt.n);
  const sf::Regime regime = sf::classify_regime(spec);
  if (format == Format::HumanOut) {
    std::cout << sf::regime_name(regime) << '\n';
  } else {
    emit(sf::Json{{"m", opt.m},
                  {"n", opt.n},
                  {"variant", sf::variant_name(spec.variant)},
                  {"regime", sf::regime_name(regime)}});
  }
  return 0;
}

int cmd_enumerate(const Options& opt, Format format) {
  const sf::FormMatrix X = sf::parse_matrix_literal(opt.matrix);
  sf::ProblemSpec spec = build_spec(opt, X.m(), X.n());
  const sf::HeightWindow window = sf::parse_window_literal(opt.window);
  sf::EngineOptions engine;
  engine.jobs = opt.jobs;
  engine.budget = opt.budget;
  const sf::EnumerationReport report =
      sf::enumerate_solutions(spec, X, window, engine);
  if (format == Format::HumanOut) {
    std::cout << report.solution_count() << " solutions for heights in ["
              << window.q_min << ", " << window.q_max << "] ("
              << report.vectors_scanned << " vectors scanned)\n";
    for (const sf::SolutionRecord& record : report.solutions) {
      std::cout << "  q = (";
      for (std::size_t i = 0; i < record.q.components.size(); ++i) {
        std::cout << (i ? ", " : "") << record.q.components[i];
      }
      std::cout << ")  margin " << record.margin << '\n';
    }
  } else {
    emit(sf::to_json(report));
  }
  return 0;
}

int cmd_classify(const Options& opt, Format format) {
  std::optional<sf::DimensionFunction> f;
  if (!opt.f.empty()) f = sf::parse_f_literal(opt.f);
  sf::CriterionSeries series(sf::criterion_kind_from_name(opt.kind), opt.m,
                             opt.n, sf::parse_psi_literal(opt.psi),
                             std::move(f));
  const sf::SeriesVerdict verdict = sf::classify(series);
  if (format == Format::HumanOut) {
    std::cout << sf::series_class_name(verdict.classification);
    if (verdict.power_exponent) {
      std::cout << "  (term ~ r^" << (*verdict.power_exponent + 0.0)
                << " log^" << (*verdict.log_exponent + 0.0) << ")";
    }
    std::cout << "\n  converged: " << verdict.zero_case
              << "\n  diverged:  " << verdict.full_case << '\n';
    for (const sf::HypothesisCheck& h : verdict.hypotheses) {
      std::cout << "  [" << (h.satisfied ? "ok" : "!!") << "] " << h.name
                << " — " << h.detail << '\n';
    }
    for (const sf::PartialSum& ps : verdict.partial_sums) {
      std::cout << "  sum to " << ps.upto << ": " << ps.sum << '\n';
    }
  } else {
    emit(sf::classification_json(series, verdict));
  }
  return 0;
}

int cmd_critical(const Options& opt, Format format) {
  const sf::CriterionKind kind = sf::criterion_kind_from_name(opt.kind);
  const sf::CriticalExponent value =
      sf::critical_exponent(kind, opt.m, opt.n, opt.tau);
  if (format == Format::HumanOut) {
    std::cout << "s* = " << value.s_star << " (ambient " << value.ambient
              << (value.within_ambient ? ", inside" : ", outside") << ")\n";
  } else {
    emit(sf::critical_exponent_json(kind, opt.m, opt.n, opt.tau, value));
  }
  return 0;
}

int cmd_reduce(const Options& opt, Format format) {
  const sf::FormMatrix X = sf::parse_matrix_literal(opt.matrix);
  const sf::RestrictedMatrix rx =
      sf::decompose(X, parse_rational_flag(opt.epsilon, "--epsilon"),
                    parse_rational_flag(opt.cap, "--cap"));
  if (format == Format::HumanOut) {
    std::cout << "member of the restricted family: det(T) = " << rx.det_top
              << '\n';
    std::cout << "xhat =";
    for (std::size_t i = 0; i < rx.xhat_float.rows(); ++i) {
      for (std::size_t j = 0; j < rx.xhat_float.cols(); ++j) {
        std::cout << ' ' << rx.xhat_float.at(i, j);
      }
      std::cout << (i + 1 < rx.xhat_float.rows() ? " ;" : "");
    }
    std::cout << '\n';
  } else {
    emit(sf::to_json(rx));
  }
  return 0;
}

int cmd_lift(const Options& opt, Format format) {
  const sf::FormMatrix X = sf::parse_matrix_literal(opt.matrix);
  const sf::RestrictedMatrix rx =
      sf::decompose(X, parse_rational_flag(opt.epsilon, "--epsilon"),
                    parse_rational_flag(opt.cap, "--cap"));
  const sf::IntegerVector r = sf::parse_vector_literal(opt.r_vector);
  const sf::LiftCertificate cert =
      sf::lift_solution(rx, r, sf::parse_psi_literal(opt.psi));
  if (format == Format::HumanOut) {
    std::cout << "q = (";
    for (std::size_t i = 0; i < cert.q.components.size(); ++i) {
      std::cout << (i ? ", " : "") << cert.q.components[i];
    }
    std::cout << "), every |qX|_i <= " << cert.bound
              << (cert.holds_at_q_height ? " (also strict at |q|)" : "")
              << '\n';
  } else {
    emit(sf::to_json(cert));
  }
  return 0;
}

int cmd_verify_cert(const Options& opt, Format format) {
  std::ifstream in(opt.cert_path);
  if (!in) {
    sf::fail(sf::errkind::io, "cannot read certificate: " + opt.cert_path);
  }
  sf::Json doc;
  try {
    doc = sf::Json::parse(in);
  } catch (const sf::Json::parse_error& e) {
    sf::fail(sf::errkind::parse,
             "certificate " + opt.cert_path + ": " + e.what());
  }
  const sf::LiftCertificate cert = sf::certificate_from_json(doc);
  const sf::FormMatrix X = sf::parse_matrix_literal(opt.matrix);
  const bool ok =
      sf::verify_certificate(cert, X, sf::parse_psi_literal(opt.psi));
  if (format == Format::HumanOut) {
    std::cout << (ok ? "verified" : "REJECTED") << '\n';
  } else {
    emit(sf::Json{{"verified", ok}});
  }
  return ok ? 0 : 1;
}

int cmd_verify_law(const Options& opt, Format format) {
  sf::ExperimentPlan plan{build_spec(opt, opt.m, opt.n),
                          opt.seed,
                          parse_schedule(opt.schedule),
                          opt.samples,
                          sf::LabMode::MeasureTrend,
                          opt.agree_high,
                          opt.agree_low,
                          opt.budget,
                          opt.jobs};
  const sf::RunRecord record = sf::zero_one_verdict(plan);
  if (format == Format::CsvOut) {
    std::cout << sf::fractions_csv(record);
  } else if (format == Format::HumanOut) {
    std::cout << "prediction: " << sf::series_class_name(record.predicted)
              << " -> " << sf::agreement_name(record.agreement) << '\n';
    for (const sf::WindowResult& wr : record.windows) {
      std::cout << "  heights [" << wr.window.q_min << ", " << wr.window.q_max
                << "]: " << wr.estimate.hits << '/' << wr.estimate.samples
                << " = " << wr.estimate.fraction << "  [" << wr.estimate.ci_low
                << ", " << wr.estimate.ci_high << "]\n";
    }
  } else {
    emit(sf::to_json(record));
  }
  return 0;
}

int cmd_box_dim(const Options& opt, Format format) {
  sf::BoxCountPlan plan{build_spec(opt, opt.m, opt.n),
                        parse_scales(opt.schedule),
                        opt.q_lo_coeff,
                        opt.q_span,
                        opt.jobs,
                        opt.budget};
  const sf::BoxCountResult result = sf::box_count_dimension(plan);
  if (format == Format::CsvOut) {
    std::cout << sf::box_counts_csv(result);
  } else if (format == Format::HumanOut) {
    for (const sf::BoxCountPoint& p : result.points) {
      std::cout << "  k = " << p.k << ": heights [" << p.q_min << ", "
                << p.q_max << "], N = " << p.box_count << '\n';
    }
    std::cout << "slope " << result.slope << " vs critical exponent "
              << result.s_star << '\n';
  } else {
    emit(sf::to_json(result));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for metric problems on systems of small linear "
               "forms"};
  app.set_version_flag("--version", sf::engine_version_string());
  app.require_subcommand(1);
  Options opt;
  app.add_option("--format", opt.format, "output format: json, csv, human")
      ->capture_default_str();

  CLI::App* regime = app.add_subcommand(
      "regime", "structural classification of a problem shape");
  regime->add_option("--m", opt.m, "number of integer variables")->required();
  regime->add_option("--n", opt.n, "number of linear forms")->required();
  regime->add_option("--variant", opt.variant, "absolute or classical");
  regime->add_option("--psi", opt.psi, "approximating function literal");

  CLI::App* enumerate =
      app.add_subcommand("enumerate", "list all solutions in a height window");
  enumerate->add_option("--matrix", opt.matrix, "form matrix literal")
      ->required();
  enumerate->add_option("--psi", opt.psi, "approximating function literal")
      ->required();
  enumerate->add_option("--window", opt.window, "height window lo:hi")
      ->required();
  enumerate->add_option("--variant", opt.variant, "absolute or classical");
  enumerate->add_option("--jobs", opt.jobs, "worker threads");
  enumerate->add_option("--budget", opt.budget, "max candidate evaluations");

  CLI::App* classify =
      app.add_subcommand("classify", "run a series convergence criterion");
  classify->add_option("kind", opt.kind, "criterion kind or alias")->required();
  classify->add_option("--m", opt.m)->required();
  classify->add_option("--n", opt.n)->required();
  classify->add_option("--psi", opt.psi, "approximating function literal")
      ->required();
  classify->add_option("--f", opt.f, "dimension function literal s[,kappa]");

  CLI::App* critical = app.add_subcommand(
      "critical", "critical Hausdorff exponent for psi(r) = c r^(-tau)");
  critical->add_option("kind", opt.kind, "criterion kind or alias")->required();
  critical->add_option("--m", opt.m)->required();
  critical->add_option("--n", opt.n)->required();
  critical->add_option("--tau", opt.tau, "decay exponent")->required();

  CLI::App* reduce = app.add_subcommand(
      "reduce", "decompose a tall matrix over the restricted family");
  reduce->add_option("--matrix", opt.matrix, "form matrix literal")->required();
  reduce->add_option("--epsilon", opt.epsilon, "determinant window parameter")
      ->capture_default_str();
  reduce->add_option("--cap", opt.cap, "entry magnitude cap")
      ->capture_default_str();

  CLI::App* lift = app.add_subcommand(
      "lift", "lift a scaled solution r to a certificate for q = (-p, r)");
  lift->add_option("--matrix", opt.matrix, "form matrix literal")->required();
  lift->add_option("--r", opt.r_vector, "integer vector literal")->required();
  lift->add_option("--psi", opt.psi, "approximating function literal")
      ->required();
  lift->add_option("--epsilon", opt.epsilon)->capture_default_str();
  lift->add_option("--cap", opt.cap)->capture_default_str();

  CLI::App* verify_cert = app.add_subcommand(
      "verify-cert", "re-check a lift certificate from scratch");
  verify_cert->add_option("--cert", opt.cert_path, "certificate JSON file")
      ->required();
  verify_cert->add_option("--matrix", opt.matrix, "form matrix literal")
      ->required();
  verify_cert->add_option("--psi", opt.psi, "approximating function literal")
      ->required();

  CLI::App* verify_law = app.add_subcommand(
      "verify-law", "confront a zero-one law with sampled hit fractions");
  verify_law->add_option("--m", opt.m)->required();
  verify_law->add_option("--n", opt.n)->required();
  verify_law->add_option("--variant", opt.variant, "absolute or classical");
  verify_law->add_option("--psi", opt.psi)->required();
  verify_law
      ->add_option("--schedule", opt.schedule,
                   "comma-separated height windows, e.g. 1:25,1:50,1:100")
      ->required();
  verify_law->add_option("--samples", opt.samples)->capture_default_str();
  verify_law->add_option("--seed", opt.seed)->capture_default_str();
  verify_law->add_option("--jobs", opt.jobs)->capture_default_str();
  verify_law->add_option("--budget", opt.budget)->capture_default_str();
  verify_law->add_option("--agree-high", opt.agree_high)
      ->capture_default_str();
  verify_law->add_option("--agree-low", opt.agree_low)->capture_default_str();

  CLI::App* box_dim = app.add_subcommand(
      "box-dim", "box-counting dimension slope against the critical exponent");
  box_dim->add_option("--m", opt.m)->required();
  box_dim->add_option("--n", opt.n)->required();
  box_dim->add_option("--psi", opt.psi, "pure power psi literal")->required();
  box_dim
      ->add_option("--schedule", opt.schedule,
                   "comma-separated grid exponents k (delta = 2^-k)")
      ->required();
  box_dim->add_option("--q-lo-coeff", opt.q_lo_coeff)->capture_default_str();
  box_dim->add_option("--q-span", opt.q_span)->capture_default_str();
  box_dim->add_option("--jobs", opt.jobs)->capture_default_str();
  box_dim->add_option("--budget", opt.budget)->capture_default_str();

  for (CLI::App* sub : {regime, enumerate, classify, critical, reduce, lift,
                        verify_cert, verify_law, box_dim}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    std::cout << sf::engine_version_string() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }

  Format format = Format::JsonOut;
  try {
    format = parse_format(opt.format);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }
  if (format == Format::CsvOut && !verify_law->parsed() &&
      !box_dim->parsed()) {
    usage_error("--format csv is only available for verify-law and box-dim");
  }

  try {
    if (regime->parsed()) return cmd_regime(opt, format);
    if (enumerate->parsed()) return cmd_enumerate(opt, format);
    if (classify->parsed()) return cmd_classify(opt, format);
    if (critical->parsed()) return cmd_critical(opt, format);
    if (reduce->parsed()) return cmd_reduce(opt, format);
    if (lift->parsed()) return cmd_lift(opt, format);
    if (verify_cert->parsed()) return cmd_verify_cert(opt, format);
    if (verify_law->parsed()) return cmd_verify_law(opt, format);
    if (box_dim->parsed()) return cmd_box_dim(opt, format);
    usage_error("no subcommand given");
  } catch (const sf::Error& e) {
    if (format == Format::HumanOut) {
      std::cerr << "error (" << e.kind() << "): " << e.what() << '\n';
    } else {
      emit(sf::error_json(e.kind(), e.what()));
    }
    return 1;
  } catch (const std::exception& e) {
    if (format == Format::HumanOut) {
      std::cerr << "internal error: " << e.what() << '\n';
    } else {
      emit(sf::error_json(sf::errkind::internal, e.what()));
    }
    return 1;
  }
  return 0;
}
