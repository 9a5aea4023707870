#include <eqgan/csv.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace eqgan {

std::string format_full(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string history_csv(const TrainHistory& history) {
  std::string out = "iteration,gen_loss,disc_loss,fidelity\n";
  for (std::size_t i = 0; i < history.iterates.size(); ++i) {
    const TrainIterate& it = history.iterates[i];
    out += std::to_string(i);
    out += ',';
    out += format_full(it.generator_loss);
    out += ',';
    out += format_full(it.discriminator_loss);
    out += ',';
    out += format_full(it.fidelity_to_true);
    out += '\n';
  }
  return out;
}

std::string dataset_csv(const Dataset& d) {
  const std::unordered_set<int> train(d.train_indices.begin(), d.train_indices.end());
  const std::unordered_set<int> test(d.test_indices.begin(), d.test_indices.end());
  std::string out = "value,label,split\n";
  for (std::size_t i = 0; i < d.values.size(); ++i) {
    const bool in_train = train.count(static_cast<int>(i)) > 0;
    const bool in_test = test.count(static_cast<int>(i)) > 0;
    if (in_train == in_test)
      throw std::invalid_argument("dataset_csv: sample " + std::to_string(i) +
                                  (in_train ? " is in both splits" : " is in neither split"));
    out += std::to_string(d.values[i]);
    out += ',';
    out += std::to_string(d.labels[i]);
    out += in_train ? ",train\n" : ",test\n";
  }
  return out;
}

namespace {

[[noreturn]] void bad_row(std::size_t line, const std::string& why) {
  throw std::invalid_argument("dataset csv, line " + std::to_string(line) + ": " + why);
}

int parse_int_field(const std::string& field, std::size_t line, const char* name) {
  std::size_t used = 0;
  int value = 0;
  try {
    value = std::stoi(field, &used);
  } catch (const std::exception&) {
    bad_row(line, std::string(name) + " is not an integer: '" + field + "'");
  }
  if (used != field.size())
    bad_row(line, std::string(name) + " is not an integer: '" + field + "'");
  return value;
}

}  // namespace

Dataset dataset_from_csv(const std::string& text, int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("dataset csv: n_qubits must be positive");
  std::istringstream in(text);
  std::string row;
  if (!std::getline(in, row) || row != "value,label,split")
    throw std::invalid_argument("dataset csv, line 1: expected header 'value,label,split'");

  Dataset d;
  d.n_qubits = n_qubits;
  const int n_bins = 1 << n_qubits;
  std::size_t line = 1;
  while (std::getline(in, row)) {
    ++line;
    if (row.empty()) continue;
    const std::size_t c1 = row.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : row.find(',', c1 + 1);
    if (c2 == std::string::npos) bad_row(line, "expected three comma-separated fields");
    const int value = parse_int_field(row.substr(0, c1), line, "value");
    const int label = parse_int_field(row.substr(c1 + 1, c2 - c1 - 1), line, "label");
    const std::string split = row.substr(c2 + 1);
    if (value < 0 || value >= n_bins)
      bad_row(line, "value " + std::to_string(value) + " outside [0, " +
                        std::to_string(n_bins) + ")");
    if (label != 0 && label != 1) bad_row(line, "label must be 0 or 1");
    const int index = static_cast<int>(d.values.size());
    if (split == "train")
      d.train_indices.push_back(index);
    else if (split == "test")
      d.test_indices.push_back(index);
    else
      bad_row(line, "split must be 'train' or 'test', got '" + split + "'");
    d.values.push_back(value);
    d.labels.push_back(label);
  }
  return d;
}

std::string histogram_csv(const std::vector<double>& probabilities) {
  std::string out = "bin,probability\n";
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_full(probabilities[i]);
    out += '\n';
  }
  return out;
}

std::string qnn_history_csv(const std::vector<QnnIterate>& iterates) {
  std::string out = "iteration,loss,prediction,label\n";
  for (std::size_t i = 0; i < iterates.size(); ++i) {
    out += std::to_string(i);
    out += ',';
    out += format_full(iterates[i].loss);
    out += ',';
    out += format_full(iterates[i].prediction);
    out += ',';
    out += std::to_string(iterates[i].label);
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace eqgan
