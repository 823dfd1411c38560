#include "stagpoint/datum_json.hpp"

#include <fstream>

#include "stagpoint/error.hpp"
#include "stagpoint/presets.hpp"

namespace stagpoint {

namespace {

Bc parse_bc(const nlohmann::json& j) {
  const std::string s = j.at("bc").get<std::string>();
  if (s == "dirichlet") return Bc::Dirichlet;
  if (s == "periodic") return Bc::Periodic;
  throw Error(ErrorCode::InvalidInput, "bc must be 'dirichlet' or 'periodic', got '" + s + "'");
}

std::vector<double> list_or_empty(const nlohmann::json& j, const char* key) {
  return j.contains(key) ? j.at(key).get<std::vector<double>>() : std::vector<double>{};
}

}  // namespace

InitialDatum datum_from_json(const nlohmann::json& j) {
  try {
    if (j.contains("preset")) return preset(j.at("preset").get<std::string>());
    const std::string form = j.at("form").get<std::string>();
    const Bc bc = parse_bc(j);
    if (form == "polynomial") {
      auto c = j.at("coefficients").get<std::vector<double>>();
      if (c.empty()) throw Error(ErrorCode::InvalidInput, "polynomial needs coefficients");
      return InitialDatum(Polynomial{std::move(c)}, bc);
    }
    if (form == "trig") {
      TrigPolynomial f;
      f.constant = j.value("constant", 0.0);
      f.sine = list_or_empty(j, "sine");
      f.cosine = list_or_empty(j, "cosine");
      return InitialDatum(f, bc);
    }
    if (form == "power") {
      PowerProfile p;
      p.anchor = j.at("anchor").get<double>();
      p.peak = j.at("peak").get<double>();
      p.c1 = j.at("c1").get<double>();
      p.q = j.at("q").get<double>();
      p.background.coefficients = list_or_empty(j, "background");
      return InitialDatum(p, bc);
    }
    throw Error(ErrorCode::InvalidInput, "form must be polynomial, trig or power, got '" + form + "'");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, std::string("datum: ") + e.what());
  }
}

nlohmann::json datum_to_json(const InitialDatum& datum) {
  nlohmann::json j;
  if (const auto* p = std::get_if<Polynomial>(&datum.form())) {
    j["form"] = "polynomial";
    j["coefficients"] = p->coefficients;
  } else if (const auto* t = std::get_if<TrigPolynomial>(&datum.form())) {
    j["form"] = "trig";
    j["constant"] = t->constant;
    j["sine"] = t->sine;
    j["cosine"] = t->cosine;
  } else {
    const auto& w = std::get<PowerProfile>(datum.form());
    j["form"] = "power";
    j["anchor"] = w.anchor;
    j["peak"] = w.peak;
    j["c1"] = w.c1;
    j["q"] = w.q;
    j["background"] = w.background.coefficients;
  }
  j["bc"] = std::string(to_string(datum.bc()));
  return j;
}

InitialDatum load_datum(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidInput, path + ": " + e.what());
  }
  return datum_from_json(j.contains("datum") ? j.at("datum") : j);
}

}  // namespace stagpoint
