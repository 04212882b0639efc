#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "epss/bench/bench.hpp"

namespace epss::bench {

namespace {

using nlohmann::ordered_json;

ordered_json optional_number(const std::optional<double>& v) {
  return v ? ordered_json(*v) : ordered_json(nullptr);
}

ordered_json row_json(const ResultRow& r) {
  ordered_json j;
  j["method"] = r.method;
  j["t_alpha"] = optional_number(r.t_alpha);
  j["t_beta"] = optional_number(r.t_beta);
  j["alpha"] = r.alpha;
  j["beta"] = r.beta;
  j["it"] = r.iterations;
  j["cpu"] = r.cpu;
  j["build_time"] = r.build_time;
  j["solve_time"] = r.solve_time;
  j["r_k"] = r.residual;
  j["e_k"] = optional_number(r.error);
  j["converged"] = r.converged;
  j["stop"] = r.stop;
  if (!r.message.empty()) j["message"] = r.message;
  return j;
}

std::string optional_text(const std::optional<double>& v, const char* missing) {
  return v ? format_number(*v) : missing;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

void text_table(std::ostringstream& os, const std::vector<ResultRow>& rows) {
  char line[512];
  std::snprintf(line, sizeof line, "%-8s %8s %8s %12s %12s %6s %12s %24s %24s %5s %s\n",
                "method", "t_alpha", "t_beta", "alpha", "beta", "IT", "CPU", "R_k", "E_k", "conv",
                "stop");
  os << line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-8s %8s %8s %12s %12s %6zu %12s %24s %24s %5s %s",
                  r.method.c_str(), optional_text(r.t_alpha, "-").c_str(),
                  optional_text(r.t_beta, "-").c_str(), format_number(r.alpha).c_str(),
                  format_number(r.beta).c_str(), r.iterations, format_number(r.cpu).c_str(),
                  format_number(r.residual).c_str(), optional_text(r.error, "-").c_str(),
                  r.converged ? "yes" : "no", r.stop.c_str());
    os << line;
    if (!r.message.empty()) os << "  (" << r.message << ')';
    os << '\n';
  }
}

void csv_table(std::ostringstream& os, const std::vector<ResultRow>& rows, const char* kind) {
  for (const auto& r : rows) {
    os << kind << ',' << csv_escape(r.method) << ',' << optional_text(r.t_alpha, "") << ','
       << optional_text(r.t_beta, "") << ',' << format_number(r.alpha) << ','
       << format_number(r.beta) << ',' << r.iterations << ',' << format_number(r.cpu) << ','
       << format_number(r.build_time) << ',' << format_number(r.solve_time) << ','
       << format_number(r.residual) << ',' << optional_text(r.error, "") << ','
       << (r.converged ? "true" : "false") << ',' << r.stop << ',' << csv_escape(r.message)
       << '\n';
  }
}

constexpr const char* kCsvHeader =
    "row,method,t_alpha,t_beta,alpha,beta,it,cpu,build_time,solve_time,r_k,e_k,converged,stop,"
    "message\n";

}  // namespace

std::string render_rows(const std::vector<ResultRow>& rows, Format format) {
  std::ostringstream os;
  switch (format) {
    case Format::json: {
      ordered_json arr = ordered_json::array();
      for (const auto& r : rows) arr.push_back(row_json(r));
      os << arr.dump(2) << '\n';
      break;
    }
    case Format::csv:
      os << kCsvHeader;
      csv_table(os, rows, "cell");
      break;
    case Format::text:
      text_table(os, rows);
      break;
  }
  return os.str();
}

std::string render_sweep(const SweepResult& result, Format format) {
  std::ostringstream os;
  switch (format) {
    case Format::json: {
      ordered_json j;
      j["problem"] = result.problem;
      j["rows"] = ordered_json::array();
      for (const auto& r : result.rows) j["rows"].push_back(row_json(r));
      j["best"] = ordered_json::array();
      for (const auto& r : result.best) j["best"].push_back(row_json(r));
      os << j.dump(2) << '\n';
      break;
    }
    case Format::csv:
      os << kCsvHeader;
      csv_table(os, result.rows, "cell");
      csv_table(os, result.best, "best");
      break;
    case Format::text:
      os << "problem: " << result.problem << "\n\n";
      text_table(os, result.rows);
      os << "\nbest (min IT, then min CPU):\n";
      text_table(os, result.best);
      break;
  }
  return os.str();
}

std::string render_certify(const CertifyOutcome& c, Format format) {
  const auto& s = c.spectral;
  const auto& k = c.corollary;
  std::ostringstream os;
  if (format == Format::json) {
    ordered_json j;
    j["problem"] = c.problem;
    j["preset"] = c.preset;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["rho"] = s.rho;
    j["nu"] = s.nu;
    j["unit_eigenvalues"] = s.unit_count;
    j["rank_i_minus_gamma"] = s.rank_i_minus_gamma;
    j["rank_i_minus_gamma_squared"] = s.rank_i_minus_gamma_sq;
    j["index_one"] = s.index_one;
    j["semi_convergent"] = s.semi_convergent;
    ordered_json spec = ordered_json::array();
    for (const auto& l : s.spectrum) spec.push_back({l.real(), l.imag()});
    j["spectrum"] = spec;
    j["corollary"] = {
        {"null_dim", k.null_basis.cols()},
        {"null_contained", k.null_contained},
        {"condition1", k.condition1},
        {"condition2", k.condition2},
        {"condition3", k.condition3},
        {"condition4", k.condition4},
        {"shift_form", k.shift_form},
        {"coupling_form", k.coupling_form},
        {"semi_convergent", k.semi_convergent()},
    };
    j["theorem_check"] = {{"unit_modulus", c.theorem.unit_modulus},
                          {"pairs_tested", c.theorem.pairs_tested},
                          {"violations", c.theorem.violations}};
    os << j.dump(2) << '\n';
    return os.str();
  }
  auto yes = [](bool b) { return b ? "true" : "false"; };
  if (format == Format::csv) {
    os << "preset,alpha,beta,rho,nu,unit_eigenvalues,rank,rank_squared,index_one,"
          "semi_convergent,corollary\n";
    os << c.preset << ',' << format_number(c.alpha) << ',' << format_number(c.beta) << ','
       << format_number(s.rho) << ',' << format_number(s.nu) << ',' << s.unit_count << ','
       << s.rank_i_minus_gamma << ',' << s.rank_i_minus_gamma_sq << ',' << yes(s.index_one) << ','
       << yes(s.semi_convergent) << ',' << yes(k.semi_convergent()) << '\n';
    return os.str();
  }
  os << "problem          " << c.problem << '\n'
     << "preset           " << c.preset << "  alpha=" << format_number(c.alpha)
     << " beta=" << format_number(c.beta) << '\n'
     << "order            " << s.spectrum.size() << '\n'
     << "rho              " << format_number(s.rho) << '\n'
     << "nu               " << format_number(s.nu) << '\n'
     << "unit eigenvalues " << s.unit_count << '\n'
     << "rank(I-G)        " << s.rank_i_minus_gamma << '\n'
     << "rank((I-G)^2)    " << s.rank_i_minus_gamma_sq << '\n'
     << "index-one        " << yes(s.index_one) << '\n'
     << "semi-convergent  " << yes(s.semi_convergent) << '\n'
     << "corollary        null dim " << k.null_basis.cols() << ", contained "
     << yes(k.null_contained) << ", conditions " << yes(k.condition1) << ' '
     << yes(k.condition2) << ' ' << yes(k.condition3) << ' ' << yes(k.condition4) << '\n'
     << "theorem check    " << c.theorem.unit_modulus << " unit-modulus eigenvalues, "
     << c.theorem.violations << " violations\n";
  return os.str();
}

}  // namespace epss::bench
