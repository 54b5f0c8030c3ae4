// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "evcharge/sim/engine.hpp"
#include "evcharge/telemetry/outbox.hpp"
#include "evcharge/telemetry/wire.hpp"

namespace evcharge::telemetry {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;

// Address the service binds to unless overridden by EVCHARGE_BIND.
[[nodiscard]] inline std::string bind_address() {
  const char* env = std::getenv("EVCHARGE_BIND");
  return env && *env ? std::string(env) : std::string("127.0.0.1");
}

// Frame interval in steps that keeps emission at or below max_rate_hz.
[[nodiscard]] inline std::int64_t emission_interval(double step_size, double max_rate_hz = 1000.0) {
  const double n = std::ceil(1.0 / (max_rate_hz * step_size) - 1e-9);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(n));
}

// Websocket front end for a running engine. All socket work happens on one
// I/O thread; the engine thread only copies frames into a bounded hand-off
// queue and never waits on a client. Commands reach the model through the
// engine's command queue, so the model is only touched by the engine thread.
template <sim::SimModel Model>
class Service {
  class Session;

 public:
  Service(sim::Engine<Model>& engine, const std::string& address, unsigned short port,
          std::size_t outbox_capacity = 256)
      : engine_(&engine), names_(engine.signal_names()), acceptor_(ioc_), capacity_(outbox_capacity) {
    const tcp::endpoint ep(net::ip::make_address(address), port);
    beast::error_code ec;
    acceptor_.open(ep.protocol(), ec);
    if (!ec) acceptor_.set_option(net::socket_base::reuse_address(true), ec);
    if (!ec) acceptor_.bind(ep, ec);
    if (!ec) acceptor_.listen(net::socket_base::max_listen_connections, ec);
    if (ec) throw std::runtime_error("cannot listen on " + address + ":" + std::to_string(port) + ": " + ec.message());
    port_ = acceptor_.local_endpoint().port();

    engine.on_frame([this](const sim::SignalFrame& f) { publish(f); },
                    emission_interval(engine.config().step_size));
    engine.on_ack([this](const sim::CommandAck& a) { route_ack(a); });
  }

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  ~Service() { shutdown(); }

  [[nodiscard]] unsigned short port() const { return port_; }
  [[nodiscard]] std::size_t client_count() const { return clients_.load(); }

  void start() {
    do_accept();
    thread_ = std::thread([this] { ioc_.run(); });
  }

  // Sends the final report to every client, then closes all sessions. Slow
  // clients get `grace` to drain before the I/O thread is stopped.
  void finish(const sim::RunReport& report, std::chrono::milliseconds grace = std::chrono::milliseconds(2000)) {
    if (!thread_.joinable()) return;
    net::post(ioc_, [this, msg = report_message(report)] {
      beast::error_code ec;
      acceptor_.close(ec);
      for (const auto& s : sessions_) {
        s->out.push_control(msg);
        s->closing = true;
        s->kick();
      }
    });
    auto timer = std::make_shared<net::steady_timer>(ioc_, grace);
    timer->async_wait([this, timer](beast::error_code) { ioc_.stop(); });
    thread_.join();
  }

  void shutdown() {
    if (!thread_.joinable()) return;
    net::post(ioc_, [this] { ioc_.stop(); });
    thread_.join();
  }

 private:
  class Session : public std::enable_shared_from_this<Session> {
   public:
    Session(Service* svc, tcp::socket socket, std::size_t capacity)
        : out(capacity), svc_(svc), ws_(std::move(socket)) {}

    void run() {
      ws_.async_accept([self = this->shared_from_this()](beast::error_code ec) {
        if (ec) return;
        self->svc_->attach(self);
        self->do_read();
      });
    }

    void kick() {
      if (writing_ || closed_) return;
      auto next = out.pop();
      if (!next) {
        if (closing) {
          closed_ = true;
          ws_.async_close(websocket::close_code::normal,
                          [self = this->shared_from_this()](beast::error_code) { self->svc_->detach(self); });
        }
        return;
      }
      writing_ = true;
      current_ = std::move(*next);
      ws_.text(true);
      ws_.async_write(net::buffer(current_), [self = this->shared_from_this()](beast::error_code ec, std::size_t) {
        self->writing_ = false;
        if (ec) {
          self->closed_ = true;
          self->svc_->detach(self);
          return;
        }
        self->kick();
      });
    }

    Outbox out;
    bool closing = false;

   private:
    void do_read() {
      ws_.async_read(buffer_, [self = this->shared_from_this()](beast::error_code ec, std::size_t) {
        if (ec) {
          self->closed_ = true;
          self->svc_->detach(self);
          return;
        }
        const std::string text = beast::buffers_to_string(self->buffer_.data());
        self->buffer_.consume(self->buffer_.size());
        self->svc_->handle(self, text);
        self->do_read();
      });
    }

    Service* svc_;
    websocket::stream<beast::tcp_stream> ws_;
    beast::flat_buffer buffer_;
    std::string current_;
    bool writing_ = false;
    bool closed_ = false;
  };

  using SessionPtr = std::shared_ptr<Session>;

  void do_accept() {
    acceptor_.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      std::make_shared<Session>(this, std::move(socket), capacity_)->run();
      do_accept();
    });
  }

  // I/O thread.
  void attach(const SessionPtr& s) {
    sessions_.insert(s);
    clients_.store(sessions_.size());
    s->out.push_control(schema_message(names_));
    s->kick();
  }
  void detach(const SessionPtr& s) {
    sessions_.erase(s);
    clients_.store(sessions_.size());
  }

  void handle(const SessionPtr& s, const std::string& text) {
    const auto parsed = parse_command(text);
    if (const auto* err = std::get_if<WireError>(&parsed)) {
      s->out.push_control(error_message(err->seq, err->message));
      s->kick();
      return;
    }
    const auto& c = std::get<ClientCommand>(parsed);
    switch (c.type) {
      case CommandType::set: {
        const std::int64_t id = next_id_++;
        {
          std::lock_guard lock(ack_mutex_);
          pending_acks_[id] = {s, c.seq};
        }
        if (auto err = engine_->commands().submit(sim::Command{id, c.path, c.value})) {
          {
            std::lock_guard lock(ack_mutex_);
            pending_acks_.erase(id);
          }
          s->out.push_control(error_message(c.seq, *err));
          s->kick();
        }
        return;
      }
      case CommandType::start:
        engine_->set_state(sim::RunState::running);
        break;
      case CommandType::pause:
        engine_->set_state(sim::RunState::paused);
        break;
      case CommandType::stop:
        engine_->set_state(sim::RunState::stopping);
        break;
    }
    s->out.push_control(ack_message(c.seq, engine_->next_step()));
    s->kick();
  }

  // Engine thread: copy and hand off.
  void publish(const sim::SignalFrame& f) {
    if (clients_.load(std::memory_order_relaxed) == 0) return;
    {
      std::lock_guard lock(frame_mutex_);
      if (frames_.size() >= capacity_) frames_.pop_front();
      frames_.push_back(f);
    }
    if (!flush_scheduled_.exchange(true)) net::post(ioc_, [this] { flush_frames(); });
  }

  void flush_frames() {
    flush_scheduled_.store(false);
    std::deque<sim::SignalFrame> batch;
    {
      std::lock_guard lock(frame_mutex_);
      batch.swap(frames_);
    }
    for (const auto& f : batch) {
      const std::string msg = frame_message(f.t, names_, f.values);
      for (const auto& s : sessions_)
        if (!s->closing) s->out.push_frame(msg);
    }
    for (const auto& s : sessions_) s->kick();
  }

  // Engine thread.
  void route_ack(const sim::CommandAck& a) {
    std::weak_ptr<Session> target;
    std::int64_t seq = 0;
    {
      std::lock_guard lock(ack_mutex_);
      auto it = pending_acks_.find(a.sequence);
      if (it == pending_acks_.end()) return;
      target = it->second.first;
      seq = it->second.second;
      pending_acks_.erase(it);
    }
    net::post(ioc_, [this, target, msg = ack_message(seq, a.applied_step)] {
      if (auto s = target.lock(); s && sessions_.count(s)) {
        s->out.push_control(msg);
        s->kick();
      }
    });
  }

  sim::Engine<Model>* engine_;
  std::vector<std::string> names_;
  net::io_context ioc_;
  tcp::acceptor acceptor_;
  std::size_t capacity_;
  unsigned short port_ = 0;
  std::thread thread_;

  std::set<SessionPtr> sessions_;
  std::atomic<std::size_t> clients_{0};

  std::mutex frame_mutex_;
  std::deque<sim::SignalFrame> frames_;
  std::atomic<bool> flush_scheduled_{false};

  std::int64_t next_id_ = 1;
  std::mutex ack_mutex_;
  std::map<std::int64_t, std::pair<std::weak_ptr<Session>, std::int64_t>> pending_acks_;
};

}  // namespace evcharge::telemetry
