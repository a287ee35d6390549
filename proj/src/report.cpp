#include "isac/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace isac {

std::string format_cell(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&c)) return *s;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", std::get<double>(c));
  return buf;
}

std::string artifact_header(const TrialLedger& l) {
  std::ostringstream o;
  o << "# isac-glrt " << l.summary.value("tool_version", std::string(ISAC_VERSION))
    << " kind=" << l.summary.value("kind", std::string(to_string(l.kind)))
    << " config_hash=" << l.summary.value("config_hash", std::string("?")) << " seed=" << l.master_seed
    << " trials=" << l.trials << " mode=" << l.summary.value("mode", std::string("?"))
    << " policy=" << l.summary.value("scenario_policy", std::string("?"));
  return o.str();
}

std::string csv_text(const Table& t, const TrialLedger& ledger) {
  std::ostringstream o;
  o << artifact_header(ledger) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) o << (i ? "," : "") << t.columns[i].name;
  o << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) o << (i ? "," : "") << format_cell(row[i]);
    o << "\n";
  }
  return o.str();
}

std::string schema_text(const Table& t, const TrialLedger& ledger) {
  std::ostringstream o;
  o << artifact_header(ledger) << "\n";
  o << "# columns of " << t.stem << ".csv\n";
  for (const auto& c : t.columns) o << c.name << ": " << c.description << "\n";
  return o.str();
}

std::string gnuplot_text(const Table& t) {
  std::ostringstream o;
  o << "# gnuplot " << t.stem << ".gp\n";
  o << "set datafile separator ','\n";
  o << "set key autotitle columnhead\n";
  o << "set grid\n";
  if (t.log_x) o << "set logscale x\n";
  if (t.log_y) o << "set logscale y\n";
  o << "set xlabel '" << t.plot_x << "'\n";
  o << "set terminal pngcairo size 900,600\n";
  o << "set output '" << t.stem << ".png'\n";
  if (t.plot_x.empty() || t.plot_y.empty()) {
    o << "# no plot hints for this table\n";
    return o.str();
  }
  const std::size_t x = t.column(t.plot_x) + 1;
  o << "plot ";
  for (std::size_t i = 0; i < t.plot_y.size(); ++i) {
    o << (i ? ", \\\n     " : "") << "'" << t.stem << ".csv' using " << x << ":" << t.column(t.plot_y[i]) + 1
      << " with linespoints title '" << t.plot_y[i] << "'";
  }
  o << "\n";
  return o.str();
}

std::string summary_text(const TrialLedger& ledger) { return ledger.summary.dump(2) + "\n"; }

namespace {

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + p.string() + "' failed");
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(const TrialLedger& ledger,
                                                  const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
  std::vector<std::filesystem::path> written;
  for (const Table& t : ledger.tables) {
    const auto csv = out_dir / (t.stem + ".csv");
    write_file(csv, csv_text(t, ledger));
    written.push_back(csv);
    const auto schema = out_dir / (t.stem + ".schema.txt");
    write_file(schema, schema_text(t, ledger));
    written.push_back(schema);
    const auto gp = out_dir / (t.stem + ".gp");
    write_file(gp, gnuplot_text(t));
    written.push_back(gp);
  }
  const std::string base = artifact_stem(to_string(ledger.kind), ledger.cfg, ledger.master_seed);
  const auto summary = out_dir / (base + "_summary.json");
  write_file(summary, summary_text(ledger));
  written.push_back(summary);
  const auto config = out_dir / (base + "_config.ini");
  write_file(config, artifact_header(ledger) + "\n" + serialize_config(ledger.cfg));
  written.push_back(config);
  return written;
}

}  // namespace isac
