#include "prs/scene_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prs/error.hpp"

namespace prs {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string u64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%" PRIu64, v);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

std::string quote(const std::string& s) { return json_quote(s); }

std::string triple(const Vec3& v) {
  return "[" + num(v.x) + ", " + num(v.y) + ", " + num(v.z) + "]";
}

std::string property_json(const EvalValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return num(*d);
  if (const auto* s = std::get_if<std::string>(&v)) return quote(*s);
  if (const auto* p = std::get_if<Vec3>(&v)) return triple(*p);
  fail(ErrorCode::Io,
       "scene property holds a non-serializable value: " +
           eval_value_to_text(v));
}

}  // namespace

std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (const unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += "\"";
  return out;
}

std::string scene_to_json(const Scene& scene) {
  std::string out;
  out += "{\n";
  out += "  \"version\": 1,\n";
  out += "  \"spec_hash\": \"" + hex64(scene.spec_hash) + "\",\n";
  out += "  \"seed\": " + u64(scene.seed) + ",\n";
  out += "  \"objects\": [";
  for (size_t i = 0; i < scene.objects.size(); ++i) {
    const SceneObject& obj = scene.objects[i];
    out += i ? ",\n    {\n" : "\n    {\n";
    out += "      \"name\": " + quote(obj.name) + ",\n";
    out += "      \"class\": " + quote(obj.class_name) + ",\n";
    out += "      \"position\": " + triple(obj.position) + ",\n";
    out += "      \"orientation\": [" + num(obj.orientation[0]) + ", " +
           num(obj.orientation[1]) + ", " + num(obj.orientation[2]) + ", " +
           num(obj.orientation[3]) + "],\n";
    out += "      \"dims\": " + triple(obj.dims) + ",\n";
    out += "      \"properties\": {";
    bool first = true;
    for (const auto& [key, value] : obj.properties) {
      out += first ? "" : ", ";
      out += quote(key) + ": " + property_json(value);
      first = false;
    }
    out += "}\n    }";
  }
  out += scene.objects.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

std::string stats_to_json(const SampleStats& stats) {
  std::string out;
  out += "{\n";
  out += "  \"scenes_requested\": " + u64(stats.scenes_requested) + ",\n";
  out += "  \"scenes_emitted\": " + u64(stats.scenes_emitted) + ",\n";
  out += "  \"collision_rejections\": " + u64(stats.collision_rejections) +
         ",\n";
  out += "  \"hit_and_run_steps_total\": " +
         u64(stats.hit_and_run_steps_total) + ",\n";
  out += "  \"wall_time_seconds\": " + num(stats.wall_time_seconds) + "\n";
  out += "}\n";
  return out;
}

namespace {

Vec3 read_triple(const nlohmann::json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3) {
    fail(ErrorCode::Io, what + " must be an array of three numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

Scene scene_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    fail(ErrorCode::Io, std::string("malformed scene JSON: ") + e.what());
  }
  try {
    if (!j.is_object() || j.value("version", 0) != 1) {
      fail(ErrorCode::Io, "scene file version must be 1");
    }
    Scene scene;
    const std::string hash = j.at("spec_hash").get<std::string>();
    scene.spec_hash = std::stoull(hash, nullptr, 16);
    scene.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& jo : j.at("objects")) {
      SceneObject obj;
      obj.name = jo.at("name").get<std::string>();
      obj.class_name = jo.at("class").get<std::string>();
      obj.position = read_triple(jo.at("position"), "position");
      const auto& q = jo.at("orientation");
      if (!q.is_array() || q.size() != 4) {
        fail(ErrorCode::Io, "orientation must be an array of four numbers");
      }
      for (int i = 0; i < 4; ++i) obj.orientation[i] = q[i].get<double>();
      const double n = std::sqrt(
          obj.orientation[0] * obj.orientation[0] +
          obj.orientation[1] * obj.orientation[1] +
          obj.orientation[2] * obj.orientation[2] +
          obj.orientation[3] * obj.orientation[3]);
      if (std::abs(n - 1.0) > 1e-9) {
        fail(ErrorCode::Io, "orientation quaternion of '" + obj.name +
                                "' is not unit length");
      }
      obj.dims = read_triple(jo.at("dims"), "dims");
      for (const auto& [key, value] : jo.at("properties").items()) {
        if (value.is_number()) {
          obj.properties[key] = value.get<double>();
        } else if (value.is_string()) {
          obj.properties[key] = value.get<std::string>();
        } else if (value.is_array() && value.size() == 3) {
          obj.properties[key] = read_triple(value, "property '" + key + "'");
        } else {
          fail(ErrorCode::Io, "property '" + key + "' has an unsupported type");
        }
      }
      scene.objects.push_back(std::move(obj));
    }
    return scene;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(ErrorCode::Io, std::string("invalid scene JSON: ") + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out.good()) {
      fail(ErrorCode::Io, "cannot open '" + tmp + "' for writing");
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out.good()) {
      fail(ErrorCode::Io, "failed writing '" + tmp + "'");
    }
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    fail(ErrorCode::Io, "cannot move temporary file into '" + path + "'");
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) {
    fail(ErrorCode::Io, "cannot open '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) {
    fail(ErrorCode::Io, "failed reading '" + path + "'");
  }
  return ss.str();
}

void write_scene_file(const Scene& scene, const std::string& path) {
  write_text_file(path, scene_to_json(scene));
}

Scene read_scene_file(const std::string& path) {
  return scene_from_json(read_text_file(path));
}

}  // namespace prs
