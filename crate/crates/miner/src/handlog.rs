//! Parser for plain-text no-limit hold'em hand histories.
//!
//! A hand starts at a `Stage #<digits>:` header and runs until the next
//! header or end of input. Street sections are delimited by the literal
//! marker lines `*** POCKET CARDS ***`, `*** FLOP ***`, `*** TURN ***`,
//! `*** RIVER ***`, `*** SHOW DOWN ***` and `*** SUMMARY ***`. Chip amounts
//! are kept in integer cents.

use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cards::Card;
use crate::money::{format_dollars, parse_dollars, Cents};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: unsupported game variant {variant:?}")]
    UnsupportedVariant { line: usize, variant: String },
    #[error("line {line}: {message}")]
    MalformedHand { line: usize, message: String },
}

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize,
)]
pub enum Street {
    PreFlop,
    Flop,
    Turn,
    River,
}

impl fmt::Display for Street {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Street::PreFlop => "pre-flop",
            Street::Flop => "flop",
            Street::Turn => "turn",
            Street::River => "river",
        };
        write!(f, "{name}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    PostSmallBlind,
    PostBigBlind,
    Fold,
    Check,
    Call,
    Bet,
    RaiseTo,
    AllIn,
    ReturnUncalled,
    Show,
    DoesNotShow,
    Collect,
    StreetMarker,
}

/// One line of hand action. `amount` is the chips moved by this event (for
/// `RaiseTo` the increment added now); `raise_to` is the resulting total
/// commitment for raises. `cards` holds the board on street markers and the
/// revealed holding on `Show`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogEvent {
    pub actor: Option<String>,
    pub kind: EventKind,
    pub amount: Cents,
    pub raise_to: Option<Cents>,
    pub street: Street,
    pub cards: Vec<Card>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeatEntry {
    pub seat_index: u32,
    pub player_id: String,
    pub starting_stack: Cents,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParsedHand {
    pub stage_id: u64,
    pub variant: String,
    pub stakes: Cents,
    pub table_name: String,
    pub dealer_seat: u32,
    pub seats: Vec<SeatEntry>,
    pub events: Vec<LogEvent>,
    /// Players appearing in the showdown section, with their revealed hole
    /// cards when shown.
    pub showdown: Vec<(String, Option<[Card; 2]>)>,
    /// `Total Pot` from the summary section.
    pub pot_total: Cents,
}

impl ParsedHand {
    pub fn revealed_hole(&self, player_id: &str) -> Option<[Card; 2]> {
        self.showdown
            .iter()
            .find(|(p, cards)| p == player_id && cards.is_some())
            .and_then(|(_, cards)| *cards)
    }
}

/// Why a hand block was skipped by the stream parser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipDiagnostic {
    pub stage_id: Option<u64>,
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StreamItem {
    Hand(ParsedHand),
    Skipped(SkipDiagnostic),
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::MalformedHand {
        line,
        message: message.into(),
    }
}

fn parse_cards_in_brackets(rest: &str, line: usize) -> Result<Vec<Card>, ParseError> {
    let mut cards = Vec::new();
    let mut remaining = rest;
    while let Some(start) = remaining.find('[') {
        let after = &remaining[start + 1..];
        let end = after
            .find(']')
            .ok_or_else(|| err(line, "unterminated card bracket"))?;
        for token in after[..end].split_whitespace() {
            let card: Card = token
                .parse()
                .map_err(|_| err(line, format!("bad card token {token:?}")))?;
            cards.push(card);
        }
        remaining = &after[end + 1..];
    }
    Ok(cards)
}

fn money_at_end(text: &str, line: usize) -> Result<Cents, ParseError> {
    let token = text
        .rsplit(|c: char| c.is_whitespace())
        .find(|t| t.starts_with('$'))
        .ok_or_else(|| err(line, "expected a dollar amount"))?;
    parse_dollars(token).map_err(|e| err(line, e.to_string()))
}

struct HeaderInfo {
    stage_id: u64,
    variant: String,
    stakes: Cents,
}

fn parse_header(text: &str, line: usize) -> Result<HeaderInfo, ParseError> {
    let rest = text
        .strip_prefix("Stage #")
        .ok_or_else(|| err(line, "expected Stage header"))?;
    let colon = rest
        .find(':')
        .ok_or_else(|| err(line, "missing ':' in Stage header"))?;
    let stage_id: u64 = rest[..colon]
        .parse()
        .map_err(|_| err(line, "bad stage id"))?;
    let after = rest[colon + 1..].trim();
    let variant = after
        .split_whitespace()
        .next()
        .ok_or_else(|| err(line, "missing game variant"))?
        .to_string();
    if variant != "Holdem" {
        return Err(ParseError::UnsupportedVariant { line, variant });
    }
    let stakes = money_at_end(after, line)?;
    Ok(HeaderInfo {
        stage_id,
        variant,
        stakes,
    })
}

fn parse_table_line(text: &str, line: usize) -> Result<(String, u32), ParseError> {
    let rest = text
        .strip_prefix("Table: ")
        .ok_or_else(|| err(line, "expected Table line"))?;
    let seat_pos = rest
        .rfind("Seat #")
        .ok_or_else(|| err(line, "missing dealer seat"))?;
    let seat_text = &rest[seat_pos + "Seat #".len()..];
    let digits: String = seat_text.chars().take_while(|c| c.is_ascii_digit()).collect();
    let dealer_seat: u32 = digits.parse().map_err(|_| err(line, "bad dealer seat"))?;
    let mut name_part = rest[..seat_pos].trim();
    if let Some(open) = name_part.rfind(" (") {
        name_part = name_part[..open].trim_end();
    }
    Ok((name_part.to_string(), dealer_seat))
}

fn parse_seat_line(text: &str, line: usize) -> Result<SeatEntry, ParseError> {
    // `Seat 6 - nZE2Jjzd6N7Iw/f/mLLEXA ($1,179 in chips)`
    let rest = text.strip_prefix("Seat ").unwrap_or_default();
    let dash = rest
        .find(" - ")
        .ok_or_else(|| err(line, "malformed seat line"))?;
    let seat_index: u32 = rest[..dash]
        .trim()
        .parse()
        .map_err(|_| err(line, "bad seat number"))?;
    let after = &rest[dash + 3..];
    let open = after
        .rfind(" ($")
        .ok_or_else(|| err(line, "missing stack in seat line"))?;
    let player_id = after[..open].to_string();
    let stack_text = &after[open + 2..];
    let close = stack_text
        .find(" in chips)")
        .ok_or_else(|| err(line, "missing 'in chips' in seat line"))?;
    let starting_stack =
        parse_dollars(&stack_text[..close]).map_err(|e| err(line, e.to_string()))?;
    Ok(SeatEntry {
        seat_index,
        player_id,
        starting_stack,
    })
}

enum BodyLine {
    Event(LogEvent),
    Showdown(String, Option<[Card; 2]>, LogEvent),
    Ignored,
}

/// Parses one action line given the current street. Lines the dialect emits
/// but the pipeline does not model (seat summaries and similar) are ignored.
fn parse_action_line(text: &str, street: Street, line: usize) -> Result<BodyLine, ParseError> {
    // Pot collection lines have no " - " separator.
    if let Some(pos) = text.find(" Collects $") {
        let actor = text[..pos].to_string();
        let rest = &text[pos + " Collects ".len()..];
        let amount_text = rest.split(" from").next().unwrap_or(rest);
        let amount = parse_dollars(amount_text.trim()).map_err(|e| err(line, e.to_string()))?;
        return Ok(BodyLine::Event(LogEvent {
            actor: Some(actor),
            kind: EventKind::Collect,
            amount,
            raise_to: None,
            street,
            cards: Vec::new(),
        }));
    }

    let Some(dash) = text.find(" - ") else {
        return Ok(BodyLine::Ignored);
    };
    let actor = text[..dash].to_string();
    let verb = text[dash + 3..].trim();

    let event = |kind: EventKind, amount: Cents, raise_to: Option<Cents>| LogEvent {
        actor: Some(actor.clone()),
        kind,
        amount,
        raise_to,
        street,
        cards: Vec::new(),
    };

    if let Some(rest) = verb.strip_prefix("Posts small blind ") {
        let amount = parse_dollars(rest.trim()).map_err(|e| err(line, e.to_string()))?;
        return Ok(BodyLine::Event(event(EventKind::PostSmallBlind, amount, None)));
    }
    if let Some(rest) = verb.strip_prefix("Posts big blind ") {
        let amount = parse_dollars(rest.trim()).map_err(|e| err(line, e.to_string()))?;
        return Ok(BodyLine::Event(event(EventKind::PostBigBlind, amount, None)));
    }
    if verb == "Folds" {
        return Ok(BodyLine::Event(event(EventKind::Fold, Cents::ZERO, None)));
    }
    if verb == "Checks" {
        return Ok(BodyLine::Event(event(EventKind::Check, Cents::ZERO, None)));
    }
    if let Some(rest) = verb.strip_prefix("Calls ") {
        let amount = parse_dollars(rest.trim()).map_err(|e| err(line, e.to_string()))?;
        return Ok(BodyLine::Event(event(EventKind::Call, amount, None)));
    }
    if let Some(rest) = verb.strip_prefix("Bets ") {
        let amount = parse_dollars(rest.trim()).map_err(|e| err(line, e.to_string()))?;
        return Ok(BodyLine::Event(event(EventKind::Bet, amount, None)));
    }
    if let Some(rest) = verb.strip_prefix("Raises ") {
        let (inc_text, total_text) = rest
            .split_once(" to ")
            .ok_or_else(|| err(line, "raise without 'to' amount"))?;
        let increment = parse_dollars(inc_text.trim()).map_err(|e| err(line, e.to_string()))?;
        let total = parse_dollars(total_text.trim()).map_err(|e| err(line, e.to_string()))?;
        // The increment equals the total when the raiser had nothing
        // committed yet this round, so equality is legal.
        if total < increment {
            return Err(err(line, "raise total below the increment"));
        }
        return Ok(BodyLine::Event(event(EventKind::RaiseTo, increment, Some(total))));
    }
    if let Some(rest) = verb.strip_prefix("All-In(Raise) ") {
        let (inc_text, total_text) = rest
            .split_once(" to ")
            .ok_or_else(|| err(line, "all-in raise without 'to' amount"))?;
        let increment = parse_dollars(inc_text.trim()).map_err(|e| err(line, e.to_string()))?;
        let total = parse_dollars(total_text.trim()).map_err(|e| err(line, e.to_string()))?;
        return Ok(BodyLine::Event(event(EventKind::AllIn, increment, Some(total))));
    }
    if let Some(rest) = verb.strip_prefix("All-In ") {
        let amount = parse_dollars(rest.trim()).map_err(|e| err(line, e.to_string()))?;
        return Ok(BodyLine::Event(event(EventKind::AllIn, amount, None)));
    }
    if let Some(rest) = verb.strip_prefix("returned (") {
        let close = rest
            .find(')')
            .ok_or_else(|| err(line, "malformed uncalled-bet return"))?;
        let amount = parse_dollars(&rest[..close]).map_err(|e| err(line, e.to_string()))?;
        return Ok(BodyLine::Event(event(EventKind::ReturnUncalled, amount, None)));
    }
    if let Some(rest) = verb.strip_prefix("Shows [") {
        let close = rest
            .find(']')
            .ok_or_else(|| err(line, "malformed show line"))?;
        let mut cards = Vec::new();
        for token in rest[..close].split_whitespace() {
            let card: Card = token
                .parse()
                .map_err(|_| err(line, format!("bad card token {token:?}")))?;
            cards.push(card);
        }
        if cards.len() != 2 {
            return Err(err(line, "show line must reveal exactly two cards"));
        }
        let revealed = [cards[0], cards[1]];
        let mut ev = event(EventKind::Show, Cents::ZERO, None);
        ev.cards = cards;
        return Ok(BodyLine::Showdown(actor, Some(revealed), ev));
    }
    if verb == "Does not show" {
        let ev = event(EventKind::DoesNotShow, Cents::ZERO, None);
        return Ok(BodyLine::Showdown(actor, None, ev));
    }
    Ok(BodyLine::Ignored)
}

/// Parses a single hand block. Line numbers in errors are relative to the
/// start of `text` (1-based); the stream parser offsets them.
pub fn parse_hand(text: &str) -> Result<ParsedHand, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.trim().is_empty());

    let (header_line, header_text) = lines.next().ok_or_else(|| err(1, "empty hand block"))?;
    let header = parse_header(header_text.trim(), header_line)?;

    let (table_line, table_text) = lines
        .next()
        .ok_or_else(|| err(header_line, "hand ends after header"))?;
    let (table_name, dealer_seat) = parse_table_line(table_text.trim(), table_line)?;

    let mut seats: Vec<SeatEntry> = Vec::new();
    let mut events: Vec<LogEvent> = Vec::new();
    let mut showdown: Vec<(String, Option<[Card; 2]>)> = Vec::new();
    let mut pot_total: Option<Cents> = None;
    let mut street = Street::PreFlop;
    let mut seen_marker: Option<Street> = None;
    let mut in_summary = false;
    let mut seats_done = false;
    let mut last_line = table_line;

    for (line_no, raw) in lines {
        last_line = line_no;
        let line = raw.trim();

        if !seats_done {
            if line.starts_with("Seat ") && line.contains(" in chips)") {
                seats.push(parse_seat_line(line, line_no)?);
                continue;
            }
            if seats.is_empty() {
                return Err(err(line_no, "expected seat list after table line"));
            }
            seats_done = true;
        }

        if let Some(marker) = line.strip_prefix("*** ") {
            let name_end = marker
                .find(" ***")
                .ok_or_else(|| err(line_no, "malformed section marker"))?;
            let name = &marker[..name_end];
            let rest = &marker[name_end + 4..];
            match name {
                "POCKET CARDS" | "FLOP" | "TURN" | "RIVER" => {
                    let next = match name {
                        "POCKET CARDS" => Street::PreFlop,
                        "FLOP" => Street::Flop,
                        "TURN" => Street::Turn,
                        _ => Street::River,
                    };
                    if in_summary {
                        return Err(err(line_no, "street marker after summary"));
                    }
                    if let Some(prev) = seen_marker {
                        if next <= prev {
                            return Err(err(line_no, "street markers out of order"));
                        }
                    } else if next != Street::PreFlop {
                        return Err(err(line_no, "first street marker must be POCKET CARDS"));
                    }
                    seen_marker = Some(next);
                    street = next;
                    let cards = parse_cards_in_brackets(rest, line_no)?;
                    events.push(LogEvent {
                        actor: None,
                        kind: EventKind::StreetMarker,
                        amount: Cents::ZERO,
                        raise_to: None,
                        street,
                        cards,
                    });
                }
                "SHOW DOWN" => {}
                "SUMMARY" => in_summary = true,
                other => return Err(err(line_no, format!("unknown section marker {other:?}"))),
            }
            continue;
        }

        if in_summary {
            if let Some(rest) = line.strip_prefix("Total Pot($") {
                let close = rest
                    .find(')')
                    .ok_or_else(|| err(line_no, "malformed Total Pot"))?;
                let amount =
                    parse_dollars(&rest[..close]).map_err(|e| err(line_no, e.to_string()))?;
                pot_total = Some(amount);
            }
            // Per-seat result lines are descriptive duplicates; skip them.
            continue;
        }

        match parse_action_line(line, street, line_no)? {
            BodyLine::Event(ev) => events.push(ev),
            BodyLine::Showdown(player, cards, ev) => {
                showdown.push((player, cards));
                events.push(ev);
            }
            BodyLine::Ignored => {}
        }
    }

    let pot_total = pot_total.ok_or_else(|| err(last_line, "summary is missing Total Pot"))?;
    if seats.is_empty() {
        return Err(err(last_line, "hand has no seats"));
    }
    let mut seen_seats = Vec::new();
    for seat in &seats {
        if seen_seats.contains(&seat.seat_index) {
            return Err(err(last_line, format!("duplicate seat {}", seat.seat_index)));
        }
        seen_seats.push(seat.seat_index);
    }
    if !seats.iter().any(|s| s.seat_index == dealer_seat) {
        return Err(err(
            last_line,
            format!("dealer seat {dealer_seat} not present in seat list"),
        ));
    }

    Ok(ParsedHand {
        stage_id: header.stage_id,
        variant: header.variant,
        stakes: header.stakes,
        table_name,
        dealer_seat,
        seats,
        events,
        showdown,
        pot_total,
    })
}

/// Renders a hand back to log text. Reparsing the output yields a structure
/// equal to the input; summary seat detail lines are not reconstructed since
/// the parser never keeps them.
pub fn render_hand(hand: &ParsedHand) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "Stage #{}: {} No Limit {}\n",
        hand.stage_id,
        hand.variant,
        format_dollars(hand.stakes)
    ));
    out.push_str(&format!(
        "Table: {} (Real Money) Seat #{} is the dealer\n",
        hand.table_name, hand.dealer_seat
    ));
    for seat in &hand.seats {
        out.push_str(&format!(
            "Seat {} - {} ({} in chips)\n",
            seat.seat_index,
            seat.player_id,
            format_dollars(seat.starting_stack)
        ));
    }
    let mut showdown_open = false;
    for event in &hand.events {
        let actor = event.actor.as_deref().unwrap_or("");
        if !showdown_open
            && matches!(
                event.kind,
                EventKind::Show | EventKind::DoesNotShow | EventKind::Collect
            )
        {
            out.push_str("*** SHOW DOWN ***\n");
            showdown_open = true;
        }
        match event.kind {
            EventKind::StreetMarker => {
                let name = match event.street {
                    Street::PreFlop => "POCKET CARDS",
                    Street::Flop => "FLOP",
                    Street::Turn => "TURN",
                    Street::River => "RIVER",
                };
                if event.cards.is_empty() {
                    out.push_str(&format!("*** {name} ***\n"));
                } else {
                    // Dialect shape: prior board in one bracket, new cards after.
                    let known = event.cards.len().saturating_sub(match event.street {
                        Street::Turn | Street::River => 1,
                        _ => 0,
                    });
                    let first: Vec<String> =
                        event.cards[..known].iter().map(|c| c.to_string()).collect();
                    let rest: Vec<String> =
                        event.cards[known..].iter().map(|c| c.to_string()).collect();
                    if rest.is_empty() {
                        out.push_str(&format!("*** {name} *** [{}]\n", first.join(" ")));
                    } else {
                        out.push_str(&format!(
                            "*** {name} *** [{}] [{}]\n",
                            first.join(" "),
                            rest.join(" ")
                        ));
                    }
                }
            }
            EventKind::PostSmallBlind => out.push_str(&format!(
                "{actor} - Posts small blind {}\n",
                format_dollars(event.amount)
            )),
            EventKind::PostBigBlind => out.push_str(&format!(
                "{actor} - Posts big blind {}\n",
                format_dollars(event.amount)
            )),
            EventKind::Fold => out.push_str(&format!("{actor} - Folds\n")),
            EventKind::Check => out.push_str(&format!("{actor} - Checks\n")),
            EventKind::Call => out.push_str(&format!(
                "{actor} - Calls {}\n",
                format_dollars(event.amount)
            )),
            EventKind::Bet => out.push_str(&format!(
                "{actor} - Bets {}\n",
                format_dollars(event.amount)
            )),
            EventKind::RaiseTo => out.push_str(&format!(
                "{actor} - Raises {} to {}\n",
                format_dollars(event.amount),
                format_dollars(event.raise_to.unwrap_or(event.amount))
            )),
            EventKind::AllIn => match event.raise_to {
                Some(total) => out.push_str(&format!(
                    "{actor} - All-In(Raise) {} to {}\n",
                    format_dollars(event.amount),
                    format_dollars(total)
                )),
                None => out.push_str(&format!(
                    "{actor} - All-In {}\n",
                    format_dollars(event.amount)
                )),
            },
            EventKind::ReturnUncalled => out.push_str(&format!(
                "{actor} - returned ({}) : not called\n",
                format_dollars(event.amount)
            )),
            EventKind::Show => {
                let cards: Vec<String> = event.cards.iter().map(|c| c.to_string()).collect();
                out.push_str(&format!("{actor} - Shows [{}]\n", cards.join(" ")));
            }
            EventKind::DoesNotShow => out.push_str(&format!("{actor} - Does not show\n")),
            EventKind::Collect => out.push_str(&format!(
                "{actor} Collects {} from main pot\n",
                format_dollars(event.amount)
            )),
        }
    }
    out.push_str("*** SUMMARY ***\n");
    out.push_str(&format!("Total Pot({})\n", format_dollars(hand.pot_total)));
    out
}

/// Splits raw input into hand blocks and parses each one. Malformed blocks
/// become [`StreamItem::Skipped`] diagnostics instead of stopping the stream.
pub fn parse_stream<R: BufRead>(reader: R) -> Vec<StreamItem> {
    let mut items = Vec::new();
    let mut block: Vec<String> = Vec::new();
    let mut block_start = 0usize;
    let mut line_no = 0usize;
    let mut preamble_junk: Option<usize> = None;

    let flush = |block: &mut Vec<String>, start: usize, items: &mut Vec<StreamItem>| {
        if block.is_empty() {
            return;
        }
        let text = block.join("\n");
        match parse_hand(&text) {
            Ok(hand) => items.push(StreamItem::Hand(hand)),
            Err(e) => {
                let stage_id = text
                    .lines()
                    .next()
                    .and_then(|l| l.strip_prefix("Stage #"))
                    .and_then(|r| r.split(':').next())
                    .and_then(|id| id.parse().ok());
                let (line, reason) = match &e {
                    ParseError::MalformedHand { line, message } => (line, message.clone()),
                    ParseError::UnsupportedVariant { line, variant } => {
                        (line, format!("unsupported game variant {variant:?}"))
                    }
                };
                items.push(StreamItem::Skipped(SkipDiagnostic {
                    stage_id,
                    line: start + line - 1,
                    reason,
                }));
            }
        }
        block.clear();
    };

    for line in reader.lines() {
        line_no += 1;
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                items.push(StreamItem::Skipped(SkipDiagnostic {
                    stage_id: None,
                    line: line_no,
                    reason: format!("read error: {e}"),
                }));
                break;
            }
        };
        if line.starts_with("Stage #") {
            flush(&mut block, block_start, &mut items);
            block_start = line_no;
            block.push(line);
        } else if block.is_empty() {
            if !line.trim().is_empty() {
                preamble_junk.get_or_insert(line_no);
            }
        } else {
            block.push(line);
        }
    }
    flush(&mut block, block_start, &mut items);

    if let Some(line) = preamble_junk {
        items.insert(
            0,
            StreamItem::Skipped(SkipDiagnostic {
                stage_id: None,
                line,
                reason: "content before first hand header".to_string(),
            }),
        );
    }
    items
}


#[cfg(test)]
pub(crate) use tests::SAMPLE_HAND;
