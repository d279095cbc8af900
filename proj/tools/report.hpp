#ifndef GRAINSIZE_TOOLS_REPORT_HPP
#define GRAINSIZE_TOOLS_REPORT_HPP

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace cli {

/// Shortest round-trip text for a double; NaN becomes an empty field.
std::string csv_number(double v);

/// JSON number, or null for NaN and infinities.
nlohmann::json json_number(double v);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  void add(std::vector<std::string> row) { rows_.push_back(std::move(row)); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes through a sibling temporary and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// .png/.tif/.tiff files directly inside `dir`, sorted by filename.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

bool is_image_file(const std::filesystem::path& path);

}  // namespace cli

#endif  // GRAINSIZE_TOOLS_REPORT_HPP
