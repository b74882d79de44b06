// Copyright (c) 2026 The bgspip authors
// SPDX-License-Identifier: Apache-2.0

#ifndef BGSPIP_HARNESS_EMIT_HPP
#define BGSPIP_HARNESS_EMIT_HPP

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "sweep.hpp"

namespace bgspip::harness
{

/// Shortest round-trip decimal; NaN is written as the literal "NaN".
inline std::string format_real(double x)
{
  if (std::isnan(x))
    return "NaN";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string join_knobs(const std::vector<double>& knobs)
{
  std::string out;
  for (std::size_t i = 0; i < knobs.size(); ++i)
  {
    if (i)
      out += ';';
    out += format_real(knobs[i]);
  }
  return out;
}

inline constexpr const char* csv_header =
    "class,knobs,kappa,algorithm,io,precision,loo,rel_res,rel_chol_res,sync_points,wall_time";

/// Writes the records as CSV. Wall time is measured on every run but only
/// written when `timing` is set, so that default output is byte-stable.
inline void write_csv(std::ostream& os, const std::vector<RunRecord>& records, bool timing = false)
{
  os << csv_header << '\n';
  for (const RunRecord& r : records)
  {
    os << to_string(r.matrix_class) << ',' << join_knobs(r.knobs) << ',' << format_real(r.kappa) << ','
       << to_string(r.algorithm) << ',' << to_string(r.io) << ',' << r.precision << ',' << format_real(r.loo) << ','
       << format_real(r.rel_residual) << ',' << format_real(r.rel_chol_residual) << ',' << r.sync_points << ','
       << format_real(timing ? r.wall_time : 0.0) << '\n';
  }
}

inline void emit_csv(const std::vector<RunRecord>& records, const std::filesystem::path& path, bool timing = false)
{
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("cannot write " + path.string());
  write_csv(os, records, timing);
}

//
// SVG kappa-plots
//

struct PlotSeries
{
  std::string label;
  std::vector<std::pair<double, double>> points; // (kappa, value), finite and positive
};

/// Reference line c * kappa^power.
struct ReferenceLine
{
  std::string label;
  double c = 1.0;
  int power = 0;
};

namespace detail
{

inline const char* series_color(std::size_t i)
{
  static constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
                                            "#e377c2", "#17becf", "#7f7f7f", "#bcbd22", "#393b79", "#637939"};
  return palette[i % std::size(palette)];
}

inline std::string xml_escape(const std::string& s)
{
  std::string out;
  for (char c : s)
  {
    switch (c)
    {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string fixed2(double v)
{
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
  return std::string(buf, res.ptr);
}

} // namespace detail

/// Renders one log-log panel. With no series the axes are still drawn.
inline std::string render_kappa_plot(const std::string& title, const std::string& ylabel,
                                     const std::vector<PlotSeries>& series, const std::vector<ReferenceLine>& refs)
{
  constexpr double W = 760, H = 460, left = 70, right = 220, top = 40, bottom = 50;
  const double pw = W - left - right, ph = H - top - bottom;

  double xlo = HUGE_VAL, xhi = -HUGE_VAL, ylo = HUGE_VAL, yhi = -HUGE_VAL;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points)
    {
      xlo = std::min(xlo, std::log10(x));
      xhi = std::max(xhi, std::log10(x));
      ylo = std::min(ylo, std::log10(y));
      yhi = std::max(yhi, std::log10(y));
    }
  if (xlo > xhi)
  {
    xlo = 0;
    xhi = 8;
    ylo = -17;
    yhi = 0;
  }
  for (const auto& r : refs)
    if (r.power == 0)
      ylo = std::min(ylo, std::log10(r.c));
  xlo = std::floor(xlo);
  xhi = std::max(std::ceil(xhi), xlo + 1);
  ylo = std::floor(ylo);
  yhi = std::max(std::ceil(yhi), ylo + 1);

  auto sx = [&](double lx) { return left + (lx - xlo) / (xhi - xlo) * pw; };
  auto sy = [&](double ly) { return top + (yhi - ly) / (yhi - ylo) * ph; };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<defs><clipPath id=\"plot\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\""
     << ph << "\"/></clipPath></defs>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
     << detail::xml_escape(title) << "</text>\n";

  const int xstep = std::max(1, static_cast<int>((xhi - xlo) / 10) + 1);
  const int ystep = std::max(1, static_cast<int>((yhi - ylo) / 10) + 1);
  for (int e = static_cast<int>(xlo); e <= static_cast<int>(xhi); e += xstep)
  {
    const std::string x = detail::fixed2(sx(e));
    os << "<line x1=\"" << x << "\" y1=\"" << top << "\" x2=\"" << x << "\" y2=\"" << top + ph
       << "\" stroke=\"#e0e0e0\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  for (int e = static_cast<int>(ylo); e <= static_cast<int>(yhi); e += ystep)
  {
    const std::string y = detail::fixed2(sy(e));
    os << "<line x1=\"" << left << "\" y1=\"" << y << "\" x2=\"" << left + pw << "\" y2=\"" << y
       << "\" stroke=\"#e0e0e0\"/>\n";
    os << "<text x=\"" << left - 6 << "\" y=\"" << y << "\" text-anchor=\"end\" dominant-baseline=\"middle\">1e" << e
       << "</text>\n";
  }
  os << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">kappa(X)</text>\n";
  os << "<text x=\"16\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << top + ph / 2 << ")\">" << detail::xml_escape(ylabel) << "</text>\n";

  os << "<g clip-path=\"url(#plot)\">\n";
  for (const auto& r : refs)
  {
    const double l0 = std::log10(r.c) + r.power * xlo;
    const double l1 = std::log10(r.c) + r.power * xhi;
    os << "<line class=\"reference\" x1=\"" << detail::fixed2(sx(xlo)) << "\" y1=\"" << detail::fixed2(sy(l0))
       << "\" x2=\"" << detail::fixed2(sx(xhi)) << "\" y2=\"" << detail::fixed2(sy(l1))
       << "\" stroke=\"#555\" stroke-dasharray=\"6 4\"/>\n";
  }
  for (std::size_t i = 0; i < series.size(); ++i)
  {
    const auto& s = series[i];
    const char* color = detail::series_color(i);
    os << "<g class=\"series\" data-label=\"" << detail::xml_escape(s.label) << "\">\n";
    if (s.points.size() > 1)
    {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" points=\"";
      for (std::size_t k = 0; k < s.points.size(); ++k)
        os << (k ? " " : "") << detail::fixed2(sx(std::log10(s.points[k].first))) << ','
           << detail::fixed2(sy(std::log10(s.points[k].second)));
      os << "\"/>\n";
    }
    for (const auto& [x, y] : s.points)
      os << "<circle cx=\"" << detail::fixed2(sx(std::log10(x))) << "\" cy=\"" << detail::fixed2(sy(std::log10(y)))
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    os << "</g>\n";
  }
  os << "</g>\n";

  double ly = top + 10;
  for (std::size_t i = 0; i < series.size(); ++i, ly += 18)
  {
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
       << "\" stroke=\"" << detail::series_color(i) << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\" dominant-baseline=\"middle\">"
       << detail::xml_escape(series[i].label) << "</text>\n";
  }
  for (const auto& r : refs)
  {
    os << "<line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 32 << "\" y2=\"" << ly
       << "\" stroke=\"#555\" stroke-dasharray=\"6 4\"/>\n";
    os << "<text x=\"" << left + pw + 38 << "\" y=\"" << ly << "\" dominant-baseline=\"middle\">"
       << detail::xml_escape(r.label) << "</text>\n";
    ly += 18;
  }
  os << "</svg>\n";
  return os.str();
}

/// Series label used in plots and the report.
inline std::string series_label(const RunRecord& r)
{
  return std::string(to_string(r.algorithm)) + " o " + std::string(to_string(r.io)) + " [" + r.precision + "]";
}

enum class PlotMetric
{
  Loo,
  CholResidual
};

/// Groups the records of one class into series (in first-appearance order of
/// the sorted records, i.e. algorithm then io), dropping NaN and zero values.
inline std::vector<PlotSeries> collect_series(const std::vector<RunRecord>& records, MatrixClass cls, PlotMetric metric)
{
  std::vector<PlotSeries> out;
  std::map<std::tuple<Algorithm, IntraorthId, std::string>, std::size_t> index;
  for (const RunRecord& r : records)
  {
    if (r.matrix_class != cls)
      continue;
    const auto key = std::make_tuple(r.algorithm, r.io, r.precision);
    auto it = index.find(key);
    if (it == index.end())
    {
      it = index.emplace(key, out.size()).first;
      out.push_back({series_label(r), {}});
    }
    const double v = metric == PlotMetric::Loo ? r.loo : r.rel_chol_residual;
    if (std::isfinite(v) && v > 0.0 && std::isfinite(r.kappa) && r.kappa > 0.0)
      out[it->second].points.emplace_back(r.kappa, v);
  }
  return out;
}

namespace detail
{

/// Low (or only) working precision of a record's precision label.
inline PrecisionId low_precision(const std::string& label)
{
  const auto slash = label.find('/');
  const auto id = parse_precision(label.substr(0, slash));
  return id ? *id : PrecisionId::Double;
}

inline std::vector<ReferenceLine> reference_lines(const std::vector<RunRecord>& records, MatrixClass cls)
{
  std::vector<PrecisionId> precs;
  for (const RunRecord& r : records)
    if (r.matrix_class == cls)
    {
      const PrecisionId p = low_precision(r.precision);
      if (std::find(precs.begin(), precs.end(), p) == precs.end())
        precs.push_back(p);
    }
  if (precs.empty())
    precs.push_back(PrecisionId::Double);
  std::sort(precs.begin(), precs.end());
  std::vector<ReferenceLine> refs;
  for (PrecisionId p : precs)
  {
    const std::string name = std::string(to_string(p));
    const double u = unit_roundoff(p);
    refs.push_back({"eps (" + name + ")", u, 0});
    refs.push_back({"eps*kappa (" + name + ")", u, 1});
    refs.push_back({"eps*kappa^2 (" + name + ")", u, 2});
  }
  return refs;
}

inline void write_text(const std::filesystem::path& path, const std::string& text)
{
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("cannot write " + path.string());
  os << text;
}

} // namespace detail

/// Writes <class>_loo.svg and <class>_cholres.svg into dir for each class in
/// `classes` (default: every class present in the records).
inline std::vector<std::filesystem::path> emit_plots(const std::vector<RunRecord>& records,
                                                     const std::filesystem::path& dir,
                                                     std::vector<MatrixClass> classes = {})
{
  if (classes.empty())
    for (const RunRecord& r : records)
      if (std::find(classes.begin(), classes.end(), r.matrix_class) == classes.end())
        classes.push_back(r.matrix_class);
  std::vector<std::filesystem::path> written;
  for (MatrixClass cls : classes)
  {
    const std::string name(to_string(cls));
    const auto refs = detail::reference_lines(records, cls);
    const auto loo = dir / (name + "_loo.svg");
    detail::write_text(loo, render_kappa_plot(name + ": loss of orthogonality", "||I - Q^T Q||",
                                              collect_series(records, cls, PlotMetric::Loo), refs));
    const auto chol = dir / (name + "_cholres.svg");
    detail::write_text(chol,
                       render_kappa_plot(name + ": relative Cholesky residual", "||X^T X - R^T R|| / ||X||^2",
                                         collect_series(records, cls, PlotMetric::CholResidual), refs));
    written.push_back(loo);
    written.push_back(chol);
  }
  return written;
}

//
// Markdown report
//

/// Current UTC time as ISO-8601, e.g. 2026-01-31T12:00:00Z.
inline std::string iso8601_now()
{
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline constexpr const char* timestamp_prefix = "Generated: ";

/// Renders report.md. The timestamp is injected so tests can pin it.
inline std::string render_report(const std::vector<RunRecord>& records, const SweepConfig& cfg,
                                 const std::string& timestamp)
{
  std::vector<MatrixClass> classes{cfg.matrix_class};
  for (const RunRecord& r : records)
    if (std::find(classes.begin(), classes.end(), r.matrix_class) == classes.end())
      classes.push_back(r.matrix_class);

  std::ostringstream os;
  os << "# Block Gram-Schmidt stability sweep\n\n";
  os << timestamp_prefix << timestamp << "\n\n";
  os << "## Configuration\n\n```json\n" << to_json(cfg).dump(2) << "\n```\n\n";

  os << "## Maximum loss of orthogonality\n\n";
  os << "Largest ||I - Q^T Q|| over the sweep; breakdowns (NaN) are counted separately.\n\n";
  os << "| algorithm | class | precision |";
  for (IntraorthId io : cfg.ios)
    os << ' ' << to_string(io) << " |";
  os << "\n|---|---|---|";
  for (std::size_t i = 0; i < cfg.ios.size(); ++i)
    os << "---|";
  os << '\n';
  for (Algorithm a : cfg.algorithms)
    for (MatrixClass cls : classes)
    {
      const std::string prec = precision_label(cfg, a);
      os << "| " << to_string(a) << " | " << to_string(cls) << " | " << prec << " |";
      for (IntraorthId io : cfg.ios)
      {
        double worst = -1.0;
        std::size_t nans = 0, total = 0;
        for (const RunRecord& r : records)
          if (r.algorithm == a && r.matrix_class == cls && r.io == io)
          {
            ++total;
            if (std::isnan(r.loo))
              ++nans;
            else
              worst = std::max(worst, r.loo);
          }
        os << ' ';
        if (total == 0)
          os << '-';
        else
        {
          os << (worst >= 0.0 ? format_real(worst) : std::string("NaN"));
          if (nans > 0 && worst >= 0.0)
            os << " (" << nans << " NaN)";
        }
        os << " |";
      }
      os << '\n';
    }

  os << "\n## Outputs\n\n- [results.csv](results.csv)\n";
  for (MatrixClass cls : classes)
  {
    const std::string name(to_string(cls));
    os << "- [" << name << "_loo.svg](" << name << "_loo.svg)\n";
    os << "- [" << name << "_cholres.svg](" << name << "_cholres.svg)\n";
  }
  return os.str();
}

inline void emit_report(const std::vector<RunRecord>& records, const SweepConfig& cfg,
                        const std::filesystem::path& path, const std::string& timestamp = iso8601_now())
{
  detail::write_text(path, render_report(records, cfg, timestamp));
}

struct RunOptions
{
  std::filesystem::path out_dir;
  unsigned jobs = 1;
  bool timing = false;
  std::string timestamp; // empty: current time
};

/// The `run` subcommand: sweep, then every emitter into out_dir.
inline std::vector<RunRecord> run_and_emit(const SweepConfig& cfg, const RunOptions& opt)
{
  const std::filesystem::path dir = opt.out_dir.empty() ? std::filesystem::path(cfg.output_dir) : opt.out_dir;
  std::filesystem::create_directories(dir);
  std::vector<RunRecord> records = run_sweep(cfg, opt.jobs);
  emit_csv(records, dir / "results.csv", opt.timing);
  emit_plots(records, dir, {cfg.matrix_class});
  emit_report(records, cfg, dir / "report.md", opt.timestamp.empty() ? iso8601_now() : opt.timestamp);
  return records;
}

} // namespace bgspip::harness

#endif
