// CSV and plain-text export of training artifacts. Doubles are printed
// with 17 significant digits so that files round-trip bit-exactly.
#pragma once

#include <eqgan/qnn.hpp>

#include <string>
#include <vector>

namespace eqgan {

/// Shortest-round-trip decimal form of a double (printf %.17g).
std::string format_full(double value);

/// Columns: iteration,gen_loss,disc_loss,fidelity. One row per iterate.
std::string history_csv(const TrainHistory& history);

/// Columns: value,label,split. One row per sample, in dataset order.
/// Throws if a sample index is missing from both splits.
std::string dataset_csv(const Dataset& d);

/// Parses the dataset_csv format back. Strict: exact header, labels in
/// {0,1}, splits in {train,test}, values in [0, 2^n_qubits).
Dataset dataset_from_csv(const std::string& text, int n_qubits = 4);

/// Columns: bin,probability.
std::string histogram_csv(const std::vector<double>& probabilities);

/// Columns: iteration,loss,prediction,label.
std::string qnn_history_csv(const std::vector<QnnIterate>& iterates);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace eqgan
