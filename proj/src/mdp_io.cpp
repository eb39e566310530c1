#include "rsrl/mdp_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include <openssl/sha.h>

namespace rsrl {

using nlohmann::json;

json mdp_to_json(const TabularMdp& mdp) {
  const auto S = mdp.num_states, A = mdp.num_actions;
  json rewards = json::array();
  json transitions = json::array();
  for (std::size_t s = 0; s < S; ++s) {
    json rrow = json::array();
    json trow = json::array();
    for (std::size_t a = 0; a < A; ++a) {
      rrow.push_back(mdp.reward(s, a));
      json p = json::array();
      for (std::size_t n = 0; n < S; ++n) p.push_back(mdp.prob(s, a, n));
      trow.push_back(std::move(p));
    }
    rewards.push_back(std::move(rrow));
    transitions.push_back(std::move(trow));
  }
  return json{{"num_states", S},        {"num_actions", A},   {"discount", mdp.discount},
              {"risk", mdp.risk},       {"rewards", rewards}, {"transitions", transitions}};
}

TabularMdp mdp_from_json(const json& j) {
  try {
    TabularMdp m;
    m.num_states = j.at("num_states").get<std::size_t>();
    m.num_actions = j.at("num_actions").get<std::size_t>();
    m.discount = j.at("discount").get<double>();
    m.risk = j.at("risk").get<double>();
    const auto S = m.num_states, A = m.num_actions;
    const auto& r = j.at("rewards");
    const auto& t = j.at("transitions");
    if (r.size() != S || t.size() != S) throw ConfigurationError("MDP JSON: outer array length must equal num_states");
    m.rewards.reserve(S * A);
    m.transitions.reserve(S * A * S);
    for (std::size_t s = 0; s < S; ++s) {
      if (r[s].size() != A || t[s].size() != A)
        throw ConfigurationError("MDP JSON: per-state array length must equal num_actions");
      for (std::size_t a = 0; a < A; ++a) {
        m.rewards.push_back(r[s][a].get<double>());
        if (t[s][a].size() != S) throw ConfigurationError("MDP JSON: transition row length must equal num_states");
        for (std::size_t n = 0; n < S; ++n) m.transitions.push_back(t[s][a][n].get<double>());
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw ConfigurationError(std::string("MDP JSON: ") + e.what());
  }
}

TabularMdp load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open MDP file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigurationError("MDP file " + path.string() + ": " + e.what());
  }
  return mdp_from_json(j);
}

void save_mdp(const TabularMdp& mdp, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << mdp_to_json(mdp).dump(2) << '\n';
}

std::string mdp_content_hash(const TabularMdp& mdp) {
  const std::string body = mdp_to_json(mdp).dump();
  std::string blob = "blob " + std::to_string(body.size());
  blob.push_back('\0');
  blob += body;
  unsigned char digest[SHA_DIGEST_LENGTH];
  SHA1(reinterpret_cast<const unsigned char*>(blob.data()), blob.size(), digest);
  std::ostringstream hex;
  for (unsigned char c : digest) hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(c);
  return hex.str();
}

}  // namespace rsrl
