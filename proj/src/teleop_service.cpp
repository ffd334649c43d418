#include "swarmtele/teleop_service.hpp"

#include <chrono>
#include <cmath>
#include <deque>
#include <future>
#include <optional>
#include <set>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "swarmtele/potential.hpp"

namespace swarmtele {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

json columns(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.cols(); ++i) out.push_back({m(0, i), m(1, i)});
  return out;
}

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

json frame_to_json(const StateFrame& frame, const TreeNetwork& tree) {
  json edges = json::array();
  const auto labels = tree.one_based_edges();
  for (std::size_t k = 0; k < labels.size(); ++k) {
    edges.push_back({{"a", labels[k].first},
                     {"b", labels[k].second},
                     {"distance", frame.edge_dist[static_cast<Eigen::Index>(k)]},
                     {"stress", frame.stress[static_cast<Eigen::Index>(k)]}});
  }
  return {{"type", "frame"},
          {"seq", frame.seq},
          {"t", frame.t},
          {"positions", columns(frame.x)},
          {"velocities", columns(frame.xdot)},
          {"edges", edges},
          {"f", vec(frame.f)},
          {"K", vec(frame.K)},
          {"V", frame.V},
          {"V_p", frame.V_p},
          {"paused", frame.paused},
          {"status", frame.status}};
}

// ---------------------------------------------------------------------------
// LiveSession

LiveSession::LiveSession(Scenario scenario) : scenario_(std::move(scenario)) {
  if (scenario_.dof() != 2) throw SchemaError("live teleoperation needs a planar swarm (dof 2)");
  scenario_.force.kind = ForceKind::live;
  live_ = std::make_shared<LiveForce>(2, scenario_.f_bar);
  control("reset");
}

LiveSession::~LiveSession() { stop(); }

StateFrame LiveSession::advance(double seconds) {
  std::lock_guard lock(mutex_);
  if (!paused_ && !broken_) {
    const double dt = scenario_.dt;
    const auto steps = static_cast<long long>(std::llround(seconds / dt));
    for (long long k = 0; k < steps; ++k) {
      try {
        state_ = sim_->step(state_, t_, dt);
        t_ += dt;
      } catch (const LinkBroken& e) {
        broken_ = true;
        failure_ = e.what();
        spdlog::warn("live session stopped at t={:.3f}: {}", t_, failure_);
        break;
      }
    }
  }
  return make_frame_locked();
}

StateFrame LiveSession::frame() const {
  std::lock_guard lock(mutex_);
  return make_frame_locked();
}

StateFrame LiveSession::make_frame_locked() const {
  StateFrame fr;
  const TraceSample s = sim_->sample(state_, t_);
  fr.seq = frame_seq_++;
  fr.t = t_;
  fr.x = s.x;
  fr.xdot = s.xdot;
  fr.edge_dist = s.edge_dist;
  const PotentialParams<>& p = sim_->design().params;
  fr.stress.resize(s.edge_dist.size());
  for (Eigen::Index e = 0; e < s.edge_dist.size(); ++e) {
    const double d = s.edge_dist[e];
    fr.stress[e] = d < p.r ? psi(d * d, p) / p.psi_max() : 1.0;
  }
  fr.f = s.f;
  fr.K = s.K;
  fr.V = s.V;
  fr.V_p = s.V_p;
  fr.paused = paused_;
  fr.status = broken_ ? "link_broken" : paused_ ? "paused" : "running";
  return fr;
}

Eigen::Vector2d LiveSession::apply_command(const ForceCommand& cmd) {
  const Eigen::VectorXd applied = live_->apply(Eigen::Vector2d(cmd.fx, cmd.fy), cmd.client, cmd.seq);
  return applied;
}

std::string LiveSession::control(const std::string& action) {
  std::lock_guard lock(mutex_);
  if (action == "pause") {
    paused_ = true;
  } else if (action == "resume") {
    paused_ = false;
  } else if (action == "reset") {
    DesignResult design = design_gains(scenario_);
    sim_ = std::make_unique<Simulator>(scenario_, std::move(design));
    sim_->set_live_force(live_);
    live_->reset();
    state_ = sim_->initial_state();
    t_ = 0.0;
    broken_ = false;
    failure_.clear();
  } else {
    throw SchemaError("unknown control action '" + action + "'");
  }
  return broken_ ? "link_broken" : paused_ ? "paused" : "running";
}

DesignResult LiveSession::design() const {
  std::lock_guard lock(mutex_);
  return sim_->design();
}

json LiveSession::summary() const {
  const DesignResult d = design();
  json robots = json::array();
  for (const auto& m : scenario_.models) robots.push_back(m.kind_name());
  json edges = json::array();
  for (const auto& [a, b] : scenario_.tree.one_based_edges()) edges.push_back({a, b});
  return {{"name", scenario_.name},
          {"robots", robots},
          {"informed", 1},
          {"edges", edges},
          {"r", scenario_.r},
          {"epsilon", scenario_.epsilon},
          {"f_bar", scenario_.f_bar},
          {"dt", scenario_.dt},
          {"rho", d.design.rho},
          {"Gamma", d.design.Gamma},
          {"P", d.params.P},
          {"Q", d.params.Q},
          {"psi_max", d.params.psi_max()}};
}

void LiveSession::start() {
  if (running_.exchange(true)) return;
  thread_ = std::thread([this] { loop(); });
}

void LiveSession::stop() {
  running_ = false;
  if (thread_.joinable()) thread_.join();
}

void LiveSession::loop() {
  using clock = std::chrono::steady_clock;
  auto last = clock::now();
  double debt = 0.0;
  while (running_) {
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
    const auto now = clock::now();
    // Cap the catch-up so a stalled machine does not integrate a burst.
    debt += std::min(0.1, std::chrono::duration<double>(now - last).count());
    last = now;
    const double steps = std::floor(debt / scenario_.dt);
    if (steps > 0) {
      advance(steps * scenario_.dt);
      debt -= steps * scenario_.dt;
    }
  }
}

// ---------------------------------------------------------------------------
// Network front end

class WsSession;

struct TeleopServer::Impl {
  std::shared_ptr<LiveSession> session;
  std::string address;
  unsigned short port = 0;
  std::chrono::nanoseconds period;
  net::io_context ioc;
  tcp::acceptor acceptor{ioc};
  net::steady_timer timer{ioc};
  std::thread thread;
  mutable std::mutex subs_mutex;
  std::set<std::shared_ptr<WsSession>> subscribers;
  std::uint64_t next_client = 1;

  void accept();
  void schedule_publish();
  void publish();
  void add(std::shared_ptr<WsSession> s) {
    std::lock_guard lock(subs_mutex);
    subscribers.insert(std::move(s));
  }
  void remove(const std::shared_ptr<WsSession>& s) {
    std::lock_guard lock(subs_mutex);
    subscribers.erase(s);
  }
};

class WsSession : public std::enable_shared_from_this<WsSession> {
 public:
  WsSession(tcp::socket socket, TeleopServer::Impl& server, std::string client)
      : ws_(std::move(socket)), server_(server), client_(std::move(client)) {}

  void run(http::request<http::string_body> req) {
    ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
    ws_.async_accept(req, [self = shared_from_this()](beast::error_code ec) {
      if (ec) {
        spdlog::info("websocket handshake failed: {}", ec.message());
        return;
      }
      self->server_.add(self);
      spdlog::info("client {} connected", self->client_);
      self->queue(json{{"type", "hello"},
                       {"client", self->client_},
                       {"scenario", self->server_.session->summary()}}
                      .dump());
      self->read();
    });
  }

  // Frames replace any frame still waiting: a slow reader only ever gets
  // the newest one.
  void send_frame(std::shared_ptr<const std::string> frame) {
    net::post(ws_.get_executor(), [self = shared_from_this(), frame = std::move(frame)] {
      self->pending_frame_ = frame;
      self->write_next();
    });
  }

  void close() {
    net::post(ws_.get_executor(), [self = shared_from_this()] {
      beast::error_code ec;
      beast::get_lowest_layer(self->ws_).socket().close(ec);
    });
  }

 private:
  void queue(std::string msg) {
    replies_.push_back(std::make_shared<const std::string>(std::move(msg)));
    write_next();
  }

  void write_next() {
    if (writing_ || closed_) return;
    if (!replies_.empty()) {
      current_ = replies_.front();
      replies_.pop_front();
    } else if (pending_frame_) {
      current_ = std::move(pending_frame_);
      pending_frame_.reset();
    } else {
      return;
    }
    writing_ = true;
    ws_.text(true);
    ws_.async_write(net::buffer(*current_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->writing_ = false;
      if (ec) {
        self->drop(ec);
        return;
      }
      self->write_next();
    });
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) {
        self->drop(ec);
        return;
      }
      const std::string text = beast::buffers_to_string(self->buffer_.data());
      self->buffer_.consume(self->buffer_.size());
      self->handle(text);
      self->read();
    });
  }

  void handle(const std::string& text) {
    json msg;
    try {
      msg = json::parse(text);
      const std::string type = msg.at("type").get<std::string>();
      if (type == "force") {
        ForceCommand cmd{msg.at("fx").get<double>(), msg.at("fy").get<double>(), client_,
                         msg.at("seq").get<std::uint64_t>()};
        const Eigen::Vector2d applied = server_.session->apply_command(cmd);
        queue(json{{"type", "ack"}, {"seq", cmd.seq}, {"fx", applied.x()}, {"fy", applied.y()}}.dump());
      } else if (type == "control") {
        const std::string action = msg.at("action").get<std::string>();
        const std::string status = server_.session->control(action);
        queue(json{{"type", "status"}, {"action", action}, {"status", status}}.dump());
      } else {
        queue(json{{"type", "error"}, {"message", "unknown message type '" + type + "'"}}.dump());
      }
    } catch (const std::exception& e) {
      queue(json{{"type", "error"}, {"message", e.what()}}.dump());
    }
  }

  void drop(beast::error_code ec) {
    if (closed_) return;
    closed_ = true;
    if (ec != websocket::error::closed) spdlog::info("client {} dropped: {}", client_, ec.message());
    server_.remove(shared_from_this());
  }

  websocket::stream<beast::tcp_stream> ws_;
  TeleopServer::Impl& server_;
  std::string client_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> replies_;
  std::shared_ptr<const std::string> pending_frame_;
  std::shared_ptr<const std::string> current_;
  bool writing_ = false;
  bool closed_ = false;
};

class HttpSession : public std::enable_shared_from_this<HttpSession> {
 public:
  HttpSession(tcp::socket socket, TeleopServer::Impl& server)
      : stream_(std::move(socket)), server_(server) {}

  void run() {
    stream_.expires_after(std::chrono::seconds(30));
    http::async_read(stream_, buffer_, req_, [self = shared_from_this()](beast::error_code ec, std::size_t) {
      if (ec) return;
      self->route();
    });
  }

 private:
  void route() {
    if (websocket::is_upgrade(req_)) {
      if (req_.target() == "/ws") {
        stream_.expires_never();
        const std::string client = "c" + std::to_string(server_.next_client++);
        std::make_shared<WsSession>(stream_.release_socket(), server_, client)->run(std::move(req_));
        return;
      }
      respond(http::status::not_found, "text/plain", "no websocket endpoint here\n");
      return;
    }
    if (req_.method() == http::verb::get && req_.target() == "/scenario") {
      respond(http::status::ok, "application/json", server_.session->summary().dump());
    } else {
      respond(http::status::not_found, "text/plain", "not found\n");
    }
  }

  void respond(http::status status, const char* type, std::string body) {
    auto res = std::make_shared<http::response<http::string_body>>(status, req_.version());
    res->set(http::field::content_type, type);
    res->keep_alive(false);
    res->body() = std::move(body);
    res->prepare_payload();
    http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code, std::size_t) {
      beast::error_code ec;
      self->stream_.socket().shutdown(tcp::socket::shutdown_send, ec);
    });
  }

  beast::tcp_stream stream_;
  TeleopServer::Impl& server_;
  beast::flat_buffer buffer_;
  http::request<http::string_body> req_;
};

void TeleopServer::Impl::accept() {
  acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
    if (ec) return;  // acceptor closed
    std::make_shared<HttpSession>(std::move(socket), *this)->run();
    accept();
  });
}

void TeleopServer::Impl::schedule_publish() {
  timer.expires_at(timer.expiry() + period);
  timer.async_wait([this](beast::error_code ec) {
    if (ec) return;
    publish();
    schedule_publish();
  });
}

void TeleopServer::Impl::publish() {
  std::vector<std::shared_ptr<WsSession>> targets;
  {
    std::lock_guard lock(subs_mutex);
    targets.assign(subscribers.begin(), subscribers.end());
  }
  if (targets.empty()) return;
  const auto text = std::make_shared<const std::string>(
      frame_to_json(session->frame(), session->scenario().tree).dump());
  for (auto& s : targets) s->send_frame(text);
}

TeleopServer::TeleopServer(std::shared_ptr<LiveSession> session, std::string address,
                           unsigned short port, double frame_rate)
    : impl_(std::make_unique<Impl>()) {
  impl_->session = std::move(session);
  impl_->address = std::move(address);
  impl_->port = port;
  impl_->period = std::chrono::duration_cast<std::chrono::nanoseconds>(
      std::chrono::duration<double>(1.0 / frame_rate));
}

TeleopServer::~TeleopServer() { stop(); }

void TeleopServer::start() {
  const tcp::endpoint ep(net::ip::make_address(impl_->address), impl_->port);
  impl_->acceptor.open(ep.protocol());
  impl_->acceptor.set_option(net::socket_base::reuse_address(true));
  impl_->acceptor.bind(ep);
  impl_->acceptor.listen();
  impl_->port = impl_->acceptor.local_endpoint().port();
  impl_->accept();
  impl_->timer.expires_after(std::chrono::nanoseconds(0));
  impl_->schedule_publish();
  impl_->thread = std::thread([this] { impl_->ioc.run(); });
  spdlog::info("serving /ws and /scenario on {}:{}", impl_->address, impl_->port);
}

void TeleopServer::stop() {
  if (!impl_ || !impl_->thread.joinable()) return;
  std::promise<void> closed;
  net::post(impl_->ioc, [this, &closed] {
    beast::error_code ec;
    impl_->acceptor.close(ec);
    impl_->timer.cancel();
    std::lock_guard lock(impl_->subs_mutex);
    for (auto& s : impl_->subscribers) s->close();
    closed.set_value();
  });
  closed.get_future().wait();
  impl_->ioc.stop();
  impl_->thread.join();
  std::lock_guard lock(impl_->subs_mutex);
  impl_->subscribers.clear();
}

unsigned short TeleopServer::port() const { return impl_->port; }

std::size_t TeleopServer::subscriber_count() const {
  std::lock_guard lock(impl_->subs_mutex);
  return impl_->subscribers.size();
}

}  // namespace swarmtele
