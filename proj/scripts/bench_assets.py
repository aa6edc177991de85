#!/usr/bin/env python3
"""Writes data/bench: suite.json, published_marks.json and the replay scripts.

Answer texts quote numbers computed here straight from the TSV fixtures, so
they are independent of the C++ store. Rerun after changing a fixture.
"""
import argparse
import json
from collections import Counter
from datetime import datetime, timedelta
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent

QUESTIONS = [
    (1, "Show all check-ins at train stations.", "B"),
    (2, "List check-ins made by user 123.", "B"),
    (3, "Find all check-ins at restaurants in 2012.", "BT"),
    (4, "What are the top 10 most popular places?", "A"),
    (5, "Which category had the most check-ins overall?", "A"),
    (6, "How many check-ins happened each month in 2012?", "AT"),
    (7, "When during the day do people check in at coffee shops?", "AT"),
    (8, "Compare check-ins at 1pm vs 1am.", "AT"),
    (9, "Show weekday vs weekend check-in totals.", "AT"),
    (10, "Which category dominates late-night activity (10pm-4am)?", "AT"),
    (11, "For the top 5 categories, what is the average check-in time of day?", "ATM"),
    (12, "For each of the top 3 categories, show the trend of monthly check-ins over 2012.", "ATM"),
    (13, "Among the top 10 places, which has the largest share of late-night check-ins?", "ATM"),
    (14, "For the top 5 users, show their distribution of activity across categories.", "AM"),
    (15, "Map the locations of all laundromats.", "BS"),
    (16, "Where are most gyms located?", "AS"),
    (17, "Show check-ins at JFK Airport.", "SE"),
    (18, "Compare check-ins in Midtown vs Downtown Manhattan.", "MSE"),
    (19, "How do categories of check-ins differ between Brooklyn and Queens?", "ASE"),
    (20, "Compare the number of morning check-ins versus evening check-ins at Central Park.", "ATS"),
    (21, "Show all check-ins at Pizza Joints.", "B"),
    (22, "Find all check-ins in February 2015.", "BT"),
    (23, "Show the busiest subway station.", "AS"),
    (24, "Show all check-ins at places with more than 1,000 visits.", "A"),
    (25, "Were check-ins higher on New Year's Eve than on an average day?", "ATME"),
    (26, "Show check-ins during Thanksgiving Day.", "TE"),
    (27, "Compare summer vs winter check-in activity.", "ATE"),
    (28, "Which places are busiest during lunch hours (11am-2pm)?", "AT"),
    (29, "Show trends in nightlife activity over time.", "AT"),
    (30, "How does check-in activity change across different times of day?", "AT"),
    (31, "Compare the most popular categories in NYC vs Tokyo.", "AMX"),
    (32, "Which city has more late-night check-ins?", "ATX"),
    (33, "Show the average check-ins per place in NYC vs Tokyo.", "AX"),
    (34, "Which city has more check-ins at train stations?", "AX"),
    (35, "Compare weekend activity patterns between NYC and Tokyo.", "ATX"),
]

NAIVE_CORRECT = {2, 3, 5, 6, 8, 12, 22, 24, 29, 30}
AGENT_WRONG = {17, 21, 35}

BOXES = {
    "brooklyn": (40.5707, 40.7395, -74.0423, -73.8334),
    "queens": (40.5091, 40.8007, -73.9642, -73.7004),
    "midtown": (40.7480, 40.7680, -74.0040, -73.9680),
    "downtown": (40.7000, 40.7250, -74.0200, -73.9950),
    "central park": (40.7644, 40.8003, -73.9817, -73.9493),
    "jfk": (40.6195, 40.6659, -73.8262, -73.7448),
}


# ---- fixture -------------------------------------------------------------------

class Checkin:
    __slots__ = ("user", "place", "category", "lat", "lon", "time")


def load(path):
    rows = []
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        f = line.split("\t")
        c = Checkin()
        c.user, c.place, c.category = f[0], f[1], f[3]
        c.lat, c.lon = float(f[4]), float(f[5])
        utc = datetime.strptime(f[7], "%a %b %d %H:%M:%S +0000 %Y")
        c.time = utc + timedelta(minutes=int(f[6]))
        rows.append(c)
    return rows


def in_box(c, box):
    la0, la1, lo0, lo1 = BOXES[box]
    return la0 <= c.lat <= la1 and lo0 <= c.lon <= lo1


def late(c):
    return c.time.hour >= 22 or c.time.hour < 4


def between(c, a, b):
    return a <= c.time < b


def fmt_box(box, prefix=""):
    la0, la1, lo0, lo1 = BOXES[box]
    return (f"{prefix}latitude BETWEEN {la0:.4f} AND {la1:.4f} AND {prefix}longitude BETWEEN {lo0:.4f} AND {lo1:.4f}")


# ---- replay helpers ------------------------------------------------------------

def act(tool, args, thought):
    return ("planner", f"Thought: {thought}\nAction: {tool}\nAction Input: {json.dumps(args)}")


def gen(args, sql, thought="Generate the query."):
    return [act("generate_sql_query", args, thought), ("sql_generator", sql)]


def exe(sql, thought="Run it."):
    return act("execute_on_database", {"sql": sql}, thought)


def schema():
    return act("get_database_schema", {}, "Check the tables and sample rows first.")


def final(text, thought="I have what I need."):
    return ("planner", f"Thought: {thought}\nFinal Answer: {text}")


def summarized(text):
    return [act("final_answer", {"summarize": True}, "Summarize the results."), ("planner", text)]


def flatten(items):
    out = []
    for it in items:
        if isinstance(it, list):
            out.extend(it)
        else:
            out.append(it)
    return out


# ---- questions -----------------------------------------------------------------

def build(nyc, tokyo):
    q = {}

    def add(qid, oracle, naive_sql, agent_steps):
        q[qid] = (oracle, naive_sql, flatten(agent_steps))

    late_sql = "(EXTRACT(HOUR FROM checkin_time) >= 22 OR EXTRACT(HOUR FROM checkin_time) < 4)"

    # 1
    sql = "SELECT * FROM checkins_nyc WHERE category_name = 'Train Station'"
    add(1, {"type": "rows", "sql": sql},
        "SELECT * FROM checkins_nyc WHERE category_name = 'train station'",
        [schema(),
         exe("SELECT DISTINCT category_name FROM checkins_nyc WHERE category_name ILIKE '%train%' "
             "OR category_name ILIKE '%station%'", "Find the exact label used for train stations."),
         gen({"request": "All check-ins with category_name 'Train Station'", "terms": ["train stations"]}, sql),
         exe(sql),
         final(f"There are {sum(c.category == 'Train Station' for c in nyc)} check-ins at train stations "
               "(category 'Train Station'); the rows are saved in r2.csv.")])

    # 2
    sql = "SELECT * FROM checkins_nyc WHERE user_id = '123'"
    n2 = sum(c.user == "123" for c in nyc)
    add(2, {"type": "rows", "sql": sql}, sql,
        [gen({"request": "All check-ins made by user_id '123'"}, sql), exe(sql),
         final(f"User 123 made {n2} check-ins; they are listed in r1.csv.")])

    # 3
    ref = ("SELECT * FROM checkins_nyc WHERE category_name LIKE '%Restaurant%' "
           "AND checkin_time >= '2012-01-01' AND checkin_time < '2013-01-01'")
    naive = ("SELECT * FROM checkins_nyc WHERE category_name ILIKE '%restaurant%' "
             "AND EXTRACT(YEAR FROM checkin_time) = 2012")
    n3 = sum("Restaurant" in c.category and c.time.year == 2012 for c in nyc)
    add(3, {"type": "rows", "sql": ref}, naive,
        [schema(), gen({"request": "Check-ins at any restaurant category (category_name containing 'Restaurant') "
                                   "during 2012"}, ref), exe(ref),
         final(f"{n3} check-ins at restaurants in 2012, across all restaurant categories.")])

    # 4
    ref = "SELECT place_id, COUNT(*) AS checkins FROM checkins_nyc GROUP BY place_id ORDER BY checkins DESC"
    top_places = Counter(c.place for c in nyc).most_common(10)
    add(4, {"type": "ranked", "sql": ref, "k": 10},
        "SELECT place_name, COUNT(*) AS visits FROM checkins_nyc GROUP BY place_name ORDER BY visits DESC LIMIT 10",
        [schema(), gen({"request": "Top 10 place_id values by number of check-ins"}, ref + " LIMIT 10"),
         exe(ref + " LIMIT 10"),
         final(f"The most popular place is {top_places[0][0]} with {top_places[0][1]} check-ins; "
               f"the top 10 range from {top_places[0][1]} down to {top_places[9][1]} check-ins (r1.csv).")])

    # 5
    ref = "SELECT category_name, COUNT(*) AS checkins FROM checkins_nyc GROUP BY category_name ORDER BY checkins DESC"
    top_cat = Counter(c.category for c in nyc).most_common(2)
    add(5, {"type": "ranked", "sql": ref, "k": 1}, ref + " LIMIT 1",
        [gen({"request": "Check-in counts per category_name, highest first"}, ref + " LIMIT 5"),
         exe(ref + " LIMIT 5"),
         final(f"{top_cat[0][0]} had the most check-ins ({top_cat[0][1]}), ahead of {top_cat[1][0]} "
               f"({top_cat[1][1]}).")])

    # 6
    ref = ("SELECT date_trunc('month', checkin_time) AS month, COUNT(*) AS checkins FROM checkins_nyc "
           "WHERE checkin_time >= '2012-01-01' AND checkin_time < '2013-01-01' GROUP BY month ORDER BY month")
    naive = ("SELECT EXTRACT(MONTH FROM checkin_time) AS month, COUNT(*) AS checkins FROM checkins_nyc "
             "WHERE EXTRACT(YEAR FROM checkin_time) = 2012 GROUP BY month ORDER BY month")
    months = Counter(c.time.month for c in nyc if c.time.year == 2012)
    add(6, {"type": "rows", "sql": ref, "columns": [1], "ordered": True}, naive,
        [gen({"request": "Number of check-ins per month in 2012, in month order"}, ref), exe(ref),
         act("plot_results", {"result_id": "r1", "kind": "line", "x": "month", "y": "checkins",
                              "title": "Check-ins per month, 2012"}, "A line plot shows the trend."),
         final(f"Monthly check-ins in 2012 ranged from {min(months.values())} to {max(months.values())}; "
               "see r1.csv and plot-1.")])

    # 7
    ref = ("SELECT EXTRACT(HOUR FROM checkin_time) AS hour, COUNT(*) AS checkins FROM checkins_nyc "
           "WHERE category_name = 'Coffee Shop' GROUP BY hour ORDER BY hour")
    coffee = Counter(c.time.hour for c in nyc if c.category == "Coffee Shop")
    peak = max(sorted(coffee), key=lambda h: coffee[h])
    add(7, {"type": "rows", "sql": ref},
        "SELECT EXTRACT(HOUR FROM checkin_time) AS hour, COUNT(*) FROM checkins_nyc "
        "WHERE category_name = 'coffee shops' GROUP BY hour",
        [gen({"request": "Check-ins per hour of day at coffee shops", "terms": ["coffee shops"], "dayparts": True},
             ref), exe(ref),
         act("plot_results", {"result_id": "r1", "kind": "line", "x": "hour", "y": "checkins",
                              "title": "Coffee shop check-ins by hour"}, "Plot the hourly profile."),
         summarized(f"Coffee shop check-ins peak at hour {peak} with {coffee[peak]} check-ins; activity is "
                    "concentrated in the morning and early afternoon and drops off late at night.")])

    # 8
    hours = Counter(c.time.hour for c in nyc)
    ref = ("SELECT EXTRACT(HOUR FROM checkin_time) AS hour, COUNT(*) AS checkins FROM checkins_nyc "
           "WHERE EXTRACT(HOUR FROM checkin_time) IN (1, 13) GROUP BY hour")
    count_h = "SELECT COUNT(*) FROM checkins_nyc WHERE EXTRACT(HOUR FROM checkin_time) = {}"
    pm, am = hours[13], hours[1]
    lead = f"1pm has more check-ins than 1am: {pm} versus {am}." if pm >= am else \
        f"1am has more check-ins than 1pm: {am} versus {pm}."
    add(8, {"type": "any_of", "of": [
            {"type": "rows", "sql": ref},
            {"type": "names_larger", "a": {"sql": count_h.format(13), "labels": ["1pm", "1 pm", "13:00"]},
             "b": {"sql": count_h.format(1), "labels": ["1am", "1 am", "01:00"]}}]},
        ref, [gen({"request": "Check-in counts for hour 13 and hour 1"}, ref), exe(ref), final(lead)])

    # 9
    ref = ("SELECT CASE WHEN EXTRACT(DOW FROM checkin_time) IN (0, 6) THEN 'weekend' ELSE 'weekday' END AS day_type, "
           "COUNT(*) AS checkins FROM checkins_nyc GROUP BY day_type")
    wk = Counter("weekend" if c.time.isoweekday() >= 6 else "weekday" for c in nyc)
    add(9, {"type": "rows", "sql": ref},
        "SELECT CASE WHEN DAYOFWEEK(checkin_time) IN (1, 7) THEN 'weekend' ELSE 'weekday' END AS day_type, "
        "COUNT(*) FROM checkins_nyc GROUP BY day_type",
        [gen({"request": "Total check-ins on weekdays vs weekends (Saturday and Sunday)"}, ref), exe(ref),
         final(f"Weekdays have {wk['weekday']} check-ins and weekends {wk['weekend']}.")])

    # 10
    ref = (f"SELECT category_name, COUNT(*) AS checkins FROM checkins_nyc WHERE {late_sql} "
           "GROUP BY category_name ORDER BY checkins DESC")
    late_cats = Counter(c.category for c in nyc if late(c)).most_common(1)[0]
    add(10, {"type": "ranked", "sql": ref, "k": 1},
        "SELECT category_name, COUNT(*) AS checkins FROM checkins_nyc "
        "WHERE EXTRACT(HOUR FROM checkin_time) BETWEEN 22 AND 4 GROUP BY category_name ORDER BY checkins DESC LIMIT 1",
        [gen({"request": "Check-ins per category between 10pm and 4am (hour >= 22 or hour < 4), highest first"},
             ref + " LIMIT 5"), exe(ref + " LIMIT 5"),
         final(f"{late_cats[0]} dominates late-night activity with {late_cats[1]} check-ins between 10pm and 4am.")])

    # 11
    top5 = [k for k, _ in Counter(c.category for c in nyc).most_common(5)]
    in5 = ", ".join("'" + t + "'" for t in top5)
    avg_expr = "ROUND(AVG(EXTRACT(HOUR FROM checkin_time) + EXTRACT(MINUTE FROM checkin_time) / 60.0), 2)"
    ref = (f"SELECT category_name, {avg_expr} AS avg_hour FROM checkins_nyc WHERE category_name IN "
           "(SELECT category_name FROM checkins_nyc GROUP BY category_name ORDER BY COUNT(*) DESC LIMIT 5) "
           "GROUP BY category_name")
    step1 = "SELECT category_name, COUNT(*) AS checkins FROM checkins_nyc GROUP BY category_name ORDER BY checkins DESC LIMIT 5"
    step2 = (f"SELECT category_name, {avg_expr} AS avg_hour FROM checkins_nyc WHERE category_name IN ({in5}) "
             "GROUP BY category_name ORDER BY avg_hour")
    avgs = {t: sum(c.time.hour + c.time.minute / 60 for c in nyc if c.category == t) /
            sum(c.category == t for c in nyc) for t in top5}
    add(11, {"type": "rows", "sql": ref, "tolerance": 0.01},
        "SELECT category_name, ROUND(AVG(EXTRACT(HOUR FROM checkin_time)), 2) AS avg_hour FROM checkins_nyc "
        "GROUP BY category_name ORDER BY COUNT(*) DESC LIMIT 5",
        [gen({"request": "The 5 categories with the most check-ins"}, step1), exe(step1),
         gen({"request": f"Average time of day as fractional hours for category_name IN ({in5})"}, step2,
             "Now the average time of day for those five."), exe(step2),
         final("Average check-in time of day (fractional hours): " +
               "; ".join(f"{t} {avgs[t]:.2f}" for t in sorted(top5, key=lambda t: avgs[t])) + ".")])

    # 12
    ref = ("SELECT category_name, date_trunc('month', checkin_time) AS month, COUNT(*) AS checkins FROM checkins_nyc "
           "WHERE category_name IN (SELECT category_name FROM checkins_nyc GROUP BY category_name "
           "ORDER BY COUNT(*) DESC LIMIT 3) AND checkin_time >= '2012-01-01' AND checkin_time < '2013-01-01' "
           "GROUP BY category_name, month ORDER BY category_name, month")
    top3 = top5[:3]
    add(12, {"type": "rows", "sql": ref}, ref,
        [gen({"request": "Monthly check-ins in 2012 for each of the 3 categories with the most check-ins"}, ref),
         exe(ref),
         act("plot_results", {"result_id": "r1", "kind": "line", "x": "month", "y": "checkins",
                              "series": "category_name", "title": "Top 3 categories by month, 2012"},
             "One line per category."),
         final(f"Monthly 2012 trends for {', '.join(top3)} are in r1.csv and plot-1.")])

    # 13
    ref = (f"SELECT place_id, ROUND(1.0 * SUM(CASE WHEN {late_sql} THEN 1 ELSE 0 END) / COUNT(*), 4) AS late_share "
           "FROM checkins_nyc WHERE place_id IN (SELECT place_id FROM checkins_nyc GROUP BY place_id "
           "ORDER BY COUNT(*) DESC LIMIT 10) GROUP BY place_id ORDER BY late_share DESC")
    tp = [p for p, _ in top_places]
    in10 = ", ".join("'" + p + "'" for p in tp)
    step1 = "SELECT place_id, COUNT(*) AS checkins FROM checkins_nyc GROUP BY place_id ORDER BY checkins DESC LIMIT 10"
    step2 = (f"SELECT place_id, ROUND(1.0 * SUM(CASE WHEN {late_sql} THEN 1 ELSE 0 END) / COUNT(*), 4) AS late_share "
             f"FROM checkins_nyc WHERE place_id IN ({in10}) GROUP BY place_id ORDER BY late_share DESC")
    shares = {p: sum(late(c) for c in nyc if c.place == p) / sum(c.place == p for c in nyc) for p in tp}
    best = max(tp, key=lambda p: shares[p])
    add(13, {"type": "ranked", "sql": ref, "k": 1},
        "SELECT place_id, late_night_checkins * 1.0 / total_checkins AS share FROM checkins_nyc "
        "ORDER BY share DESC LIMIT 1",
        [gen({"request": "Top 10 place_id values by check-ins"}, step1), exe(step1),
         gen({"request": f"Share of late-night check-ins (hour >= 22 or hour < 4) per place for place_id IN ({in10})"},
             step2, "Compute the late-night share for those ten places."), exe(step2),
         final(f"Place {best} has the largest late-night share among the top 10 places: "
               f"{shares[best] * 100:.1f}% of its check-ins fall between 10pm and 4am.")])

    # 14
    users = Counter(c.user for c in nyc)
    top_users = sorted(users, key=lambda u: (-users[u], u))[:5]
    ref = ("SELECT user_id, category_name, COUNT(*) AS checkins FROM checkins_nyc WHERE user_id IN "
           "(SELECT user_id FROM checkins_nyc GROUP BY user_id ORDER BY COUNT(*) DESC, user_id LIMIT 5) "
           "GROUP BY user_id, category_name")
    inu = ", ".join("'" + u + "'" for u in top_users)
    step1 = "SELECT user_id, COUNT(*) AS checkins FROM checkins_nyc GROUP BY user_id ORDER BY checkins DESC, user_id LIMIT 5"
    step2 = (f"SELECT user_id, category_name, COUNT(*) AS checkins FROM checkins_nyc WHERE user_id IN ({inu}) "
             "GROUP BY user_id, category_name ORDER BY user_id, checkins DESC")
    add(14, {"type": "rows", "sql": ref},
        "SELECT user_id, category_name, COUNT(*) AS checkins FROM checkins_nyc GROUP BY user_id, category_name "
        "ORDER BY checkins DESC LIMIT 5",
        [gen({"request": "The 5 users with the most check-ins"}, step1), exe(step1),
         gen({"request": f"Check-ins per category for user_id IN ({inu})"}, step2,
             "Break those users down by category."), exe(step2),
         act("plot_results", {"result_id": "r2", "kind": "bar", "x": "category_name", "y": "checkins",
                              "series": "user_id", "title": "Top 5 users by category"}, "Grouped bars per user."),
         final(f"The top 5 users ({', '.join(top_users)}) account for "
               f"{sum(users[u] for u in top_users)} check-ins; their per-category breakdown is in r2.csv and plot-1.")])

    # 15
    ref = "SELECT latitude, longitude FROM checkins_nyc WHERE category_name = 'Laundry Service'"
    n15 = sum(c.category == "Laundry Service" for c in nyc)
    add(15, {"type": "all_of", "of": [{"type": "rows", "sql": ref}, {"type": "artifact", "kind": "map"}]},
        "SELECT latitude, longitude FROM checkins_nyc WHERE category_name = 'Laundromat'",
        [schema(),
         exe("SELECT DISTINCT category_name FROM checkins_nyc WHERE category_name ILIKE '%laund%' "
             "OR category_name ILIKE '%wash%'", "No laundromat label in the samples; look for similar labels."),
         gen({"request": "Latitude and longitude of check-ins at laundromats", "terms": ["laundromats"]}, ref),
         exe(ref),
         act("map_results", {"result_id": "r2", "kind": "points"}, "Put them on a map."),
         summarized(f"Laundry Service check-ins ({n15}) are mapped in map-1; they are spread across residential "
                    "neighborhoods rather than one cluster.")])

    # 16
    ref = "SELECT latitude, longitude FROM checkins_nyc WHERE category_name IN ('Gym / Fitness Center', 'Gym')"
    n16 = sum(c.category in ("Gym / Fitness Center", "Gym") for c in nyc)
    add(16, {"type": "rows", "sql": ref},
        "SELECT location, COUNT(*) FROM checkins_nyc WHERE category_name = 'gym' GROUP BY location "
        "ORDER BY COUNT(*) DESC",
        [gen({"request": "Latitude and longitude of gym check-ins", "terms": ["gyms"]}, ref), exe(ref),
         act("map_results", {"result_id": "r1", "kind": "heatmap"}, "A heatmap shows where they concentrate."),
         summarized(f"The {n16} gym check-ins concentrate in Manhattan, with the densest bins in Midtown; "
                    "see map-1.")])

    # 17
    jfk = f"SELECT * FROM checkins_nyc WHERE {fmt_box('jfk')}"
    add(17, {"type": "rows", "sql": jfk},
        "SELECT * FROM checkins_nyc WHERE venue_name ILIKE '%JFK%'",
        [exe("SELECT * FROM checkins_nyc WHERE ST_DWithin(ST_MakePoint(longitude, latitude), "
             "ST_MakePoint(-73.7781, 40.6413), 2000)", "Filter within 2 km of the JFK coordinates."),
         exe("SELECT * FROM checkins_nyc WHERE earth_distance(ll_to_earth(latitude, longitude), "
             "ll_to_earth(40.6413, -73.7781)) < 2000", "Try the earthdistance functions instead."),
         exe("SELECT * FROM checkins_nyc WHERE ST_Distance(ST_MakePoint(longitude, latitude), "
             "ST_MakePoint(-73.7781, 40.6413)) < 0.02", "Try a planar distance."),
         final("I could not compute a distance filter around JFK Airport with the available SQL functions.",
               "Distance functions are unavailable and the retry limit is reached.")])

    # 18
    mid = sum(in_box(c, "midtown") for c in nyc)
    down = sum(in_box(c, "downtown") for c in nyc)
    count_box = "SELECT COUNT(*) FROM checkins_nyc WHERE {}"
    case = (f"CASE WHEN {fmt_box('midtown')} THEN 'Midtown Manhattan' "
            f"WHEN {fmt_box('downtown')} THEN 'Downtown Manhattan' END")
    sql = (f"SELECT region, COUNT(*) AS checkins FROM (SELECT {case} AS region FROM checkins_nyc) t "
           "WHERE region IS NOT NULL GROUP BY region")
    big, small = (("Midtown", mid), ("Downtown", down)) if mid >= down else (("Downtown", down), ("Midtown", mid))
    add(18, {"type": "all_of", "of": [
            {"type": "names_larger", "a": {"sql": count_box.format(fmt_box("midtown")), "labels": ["midtown"]},
             "b": {"sql": count_box.format(fmt_box("downtown")), "labels": ["downtown"]}},
            {"type": "mentions_value", "values": [{"sql": count_box.format(fmt_box("midtown"))},
                                                  {"sql": count_box.format(fmt_box("downtown"))}]}]},
        "SELECT neighborhood, COUNT(*) FROM checkins_nyc WHERE neighborhood IN ('Midtown', 'Downtown') "
        "GROUP BY neighborhood",
        [gen({"request": "Check-ins per region for Midtown and Downtown Manhattan",
              "regions": ["midtown manhattan", "downtown manhattan"], "region_alias": "region"}, sql),
         exe(sql),
         final(f"{big[0]} Manhattan has more check-ins: {big[1]} versus {small[1]} in {small[0]} Manhattan.")])

    # 19
    case = (f"CASE WHEN {fmt_box('brooklyn')} THEN 'Brooklyn' WHEN {fmt_box('queens')} THEN 'Queens' END")
    ref = (f"SELECT borough, category_name, COUNT(*) AS checkins FROM (SELECT category_name, {case} AS borough "
           "FROM checkins_nyc) t WHERE borough IS NOT NULL GROUP BY borough, category_name "
           "ORDER BY borough, checkins DESC")
    add(19, {"type": "rows", "sql": ref},
        "SELECT borough, category_name, COUNT(*) FROM checkins_nyc WHERE borough IN ('Brooklyn', 'Queens') "
        "GROUP BY borough, category_name",
        [gen({"request": "Check-ins per borough and category for Brooklyn and Queens",
              "regions": ["brooklyn", "queens"]}, ref), exe(ref),
         act("plot_results", {"result_id": "r1", "kind": "bar", "x": "category_name", "y": "checkins",
                              "series": "borough", "title": "Categories in Brooklyn vs Queens"},
             "Grouped bars make the comparison easy."),
         summarized("Brooklyn and Queens differ mostly in how home, office and transit categories rank; "
                    "the full breakdown is in r1.csv and plot-1.")])

    # 20
    cp = [c for c in nyc if in_box(c, "central park")]
    morning = sum(6 <= c.time.hour < 12 for c in cp)
    evening = sum(c.time.hour >= 18 for c in cp)
    hour = "EXTRACT(HOUR FROM checkin_time)"
    cp_where = fmt_box("central park")
    count_m = f"SELECT COUNT(*) FROM checkins_nyc WHERE {cp_where} AND {hour} >= 6 AND {hour} < 12"
    count_e = f"SELECT COUNT(*) FROM checkins_nyc WHERE {cp_where} AND {hour} >= 18"
    diff = (f"SELECT ABS(SUM(CASE WHEN {hour} >= 18 THEN 1 ELSE 0 END) - "
            f"SUM(CASE WHEN {hour} >= 6 AND {hour} < 12 THEN 1 ELSE 0 END)) FROM checkins_nyc WHERE {cp_where}")
    sql = (f"SELECT SUM(CASE WHEN {hour} >= 6 AND {hour} < 12 THEN 1 ELSE 0 END) AS morning, "
           f"SUM(CASE WHEN {hour} >= 18 THEN 1 ELSE 0 END) AS evening FROM checkins_nyc WHERE {cp_where}")
    if evening >= morning:
        text = (f"Evening check-ins at Central Park outnumber morning ones: {evening} in the evening (18-24) versus "
                f"{morning} in the morning (6-12), a difference of {evening - morning}.")
    else:
        text = (f"Morning check-ins at Central Park outnumber evening ones: {morning} in the morning (6-12) versus "
                f"{evening} in the evening (18-24), a difference of {morning - evening}.")
    add(20, {"type": "all_of", "of": [
            {"type": "names_larger", "a": {"sql": count_e, "labels": ["evening"]},
             "b": {"sql": count_m, "labels": ["morning"]}},
            {"type": "mentions_value", "sql": diff}]},
        "SELECT COUNT(*) FROM checkins_nyc WHERE place_name = 'Central Park' GROUP BY time_of_day",
        [gen({"request": "Morning (6-12) and evening (18-24) check-in counts inside Central Park",
              "regions": ["central park"]}, sql), exe(sql), final(text)])

    # 21
    ref = "SELECT * FROM checkins_nyc WHERE category_name ILIKE '%pizza%'"
    wrong = "SELECT * FROM checkins_nyc WHERE category_name = 'Pizza Joints'"
    add(21, {"type": "rows", "sql": ref}, wrong,
        [gen({"request": "All check-ins with category_name 'Pizza Joints'"}, wrong), exe(wrong),
         exe("SELECT DISTINCT category_name FROM checkins_nyc WHERE category_name ILIKE '%joint%'",
             "Maybe the label is spelled differently."),
         final("There are no check-ins at Pizza Joints in this dataset.",
               "No joint labels exist, so the answer is zero.")])

    # 22
    ref = "SELECT * FROM checkins_nyc WHERE checkin_time >= '2015-02-01' AND checkin_time < '2015-03-01'"
    first, last = min(c.time for c in nyc), max(c.time for c in nyc)
    add(22, {"type": "rows", "sql": ref, "result": "any"},
        "SELECT * FROM checkins_nyc WHERE EXTRACT(YEAR FROM checkin_time) = 2015 AND EXTRACT(MONTH FROM checkin_time) = 2",
        [exe(ref, "Filter to February 2015."),
         exe("SELECT MIN(checkin_time) AS first_checkin, MAX(checkin_time) AS last_checkin FROM checkins_nyc",
             "No rows; check the date range the data covers."),
         final(f"There are no check-ins in February 2015: the data covers {first:%Y-%m-%d} to {last:%Y-%m-%d}.")])

    # 23
    ref = ("SELECT place_id, COUNT(*) AS checkins FROM checkins_nyc WHERE category_name = 'Subway' "
           "GROUP BY place_id ORDER BY checkins DESC")
    sub = Counter(c.place for c in nyc if c.category == "Subway").most_common(1)[0]
    add(23, {"type": "ranked", "sql": ref, "k": 1},
        "SELECT place_id, COUNT(*) AS checkins FROM checkins_nyc WHERE category_name = 'Subway Station' "
        "GROUP BY place_id ORDER BY checkins DESC LIMIT 1",
        [gen({"request": "Check-ins per subway station place_id, highest first", "terms": ["subway station"]},
             ref + " LIMIT 5"), exe(ref + " LIMIT 5"),
         final(f"The busiest subway station is place {sub[0]} with {sub[1]} check-ins.")])

    # 24
    tmpl = ("SELECT * FROM checkins_nyc WHERE place_id IN (SELECT place_id FROM checkins_nyc GROUP BY place_id "
            "HAVING COUNT(*) > {})")
    n24 = sum(Counter(c.place for c in nyc)[c.place] > 50 for c in nyc)
    add(24, {"type": "rows", "sql": tmpl.format("${place_visit_threshold}")}, tmpl.format(50),
        [gen({"request": "Check-ins at places with more than 50 check-ins in total"}, tmpl.format(50)),
         exe(tmpl.format(50)), final(f"{n24} check-ins happened at places with more than 50 visits.")])

    # 25
    nye = sum(c.time.date() == datetime(2012, 12, 31).date() for c in nyc)
    days = len({c.time.date() for c in nyc})
    avg_day = len(nyc) / days
    ref = ("SELECT CASE WHEN (SELECT COUNT(*) FROM checkins_nyc WHERE checkin_time >= '2012-12-31' AND "
           "checkin_time < '2013-01-01') > (SELECT COUNT(*) * 1.0 / COUNT(DISTINCT date_trunc('day', checkin_time)) "
           "FROM checkins_nyc) THEN 1 ELSE 0 END")
    sql = ("SELECT (SELECT COUNT(*) FROM checkins_nyc WHERE checkin_time >= '2012-12-31 00:00:00' AND "
           "checkin_time < '2013-01-01 00:00:00') AS nye_checkins, ROUND((SELECT COUNT(*) * 1.0 / "
           "COUNT(DISTINCT date_trunc('day', checkin_time)) FROM checkins_nyc), 2) AS avg_daily_checkins")
    yes = nye > avg_day
    add(25, {"type": "yes_no", "sql": ref},
        "SELECT COUNT(*) FROM checkins_nyc WHERE checkin_time = '2012-12-31'",
        [gen({"request": "Check-ins on New Year's Eve 2012 and the average check-ins per day with data",
              "windows": [{"name": "new year's eve", "year": 2012}]}, sql), exe(sql),
         final(f"{'Yes' if yes else 'No'}. New Year's Eve 2012 had {nye} check-ins, against an average of "
               f"{avg_day:.2f} per day.")])

    # 26
    ref = ("SELECT * FROM checkins_nyc WHERE checkin_time >= '2012-11-22 00:00:00' AND "
           "checkin_time < '2012-11-23 00:00:00'")
    n26 = sum(c.time.date() == datetime(2012, 11, 22).date() for c in nyc)
    add(26, {"type": "rows", "sql": ref},
        "SELECT * FROM checkins_nyc WHERE holiday = 'Thanksgiving'",
        [gen({"request": "All check-ins on Thanksgiving Day 2012", "windows": [{"name": "thanksgiving", "year": 2012}]},
             ref), exe(ref), final(f"{n26} check-ins on Thanksgiving Day (2012-11-22); see r1.csv.")])

    # 27
    summer_w = "checkin_time >= '2012-06-01 00:00:00' AND checkin_time < '2012-09-01 00:00:00'"
    winter_w = "checkin_time >= '2012-12-01 00:00:00' AND checkin_time < '2013-03-01 00:00:00'"
    summer = sum(between(c, datetime(2012, 6, 1), datetime(2012, 9, 1)) for c in nyc)
    winter = sum(between(c, datetime(2012, 12, 1), datetime(2013, 3, 1)) for c in nyc)
    sql = (f"SELECT 'summer' AS season, COUNT(*) AS checkins FROM checkins_nyc WHERE {summer_w} UNION ALL "
           f"SELECT 'winter' AS season, COUNT(*) AS checkins FROM checkins_nyc WHERE {winter_w}")
    big = ("Summer", summer, "winter", winter) if summer >= winter else ("Winter", winter, "summer", summer)
    add(27, {"type": "all_of", "of": [
            {"type": "names_larger", "a": {"sql": f"SELECT COUNT(*) FROM checkins_nyc WHERE {summer_w}",
                                           "labels": ["summer"]},
             "b": {"sql": f"SELECT COUNT(*) FROM checkins_nyc WHERE {winter_w}", "labels": ["winter"]}},
            {"type": "mentions_value", "values": [{"sql": f"SELECT COUNT(*) FROM checkins_nyc WHERE {summer_w}"},
                                                  {"sql": f"SELECT COUNT(*) FROM checkins_nyc WHERE {winter_w}"}]}]},
        "SELECT season, COUNT(*) FROM checkins_nyc GROUP BY season",
        [gen({"request": "Check-in counts for summer 2012 and winter 2012-13",
              "windows": [{"name": "summer", "year": 2012}, {"name": "winter", "year": 2012}]}, sql), exe(sql),
         final(f"{big[0]} was busier: {big[1]} check-ins versus {big[3]} in {big[2]} "
               "(summer Jun-Aug 2012, winter Dec 2012-Feb 2013).")])

    # 28
    ref = (f"SELECT place_id, COUNT(*) AS checkins FROM checkins_nyc WHERE {hour} >= 11 AND {hour} < 14 "
           "GROUP BY place_id ORDER BY checkins DESC")
    lunch = Counter(c.place for c in nyc if 11 <= c.time.hour < 14).most_common(1)[0]
    add(28, {"type": "ranked", "sql": ref, "k": 5},
        "SELECT place_name, COUNT(*) FROM checkins_nyc WHERE EXTRACT(HOUR FROM checkin_time) BETWEEN 11 AND 14 "
        "GROUP BY place_name ORDER BY COUNT(*) DESC LIMIT 5",
        [gen({"request": "Top 5 place_id values by check-ins between 11am and 2pm (hour 11 to 13)"}, ref + " LIMIT 5"),
         exe(ref + " LIMIT 5"),
         final(f"The busiest place at lunch is {lunch[0]} with {lunch[1]} check-ins between 11am and 2pm; "
               "the top 5 are in r1.csv.")])

    # 29
    ref = ("SELECT date_trunc('month', checkin_time) AS month, COUNT(*) AS checkins FROM checkins_nyc "
           "WHERE category_name IN ('Bar', 'Nightclub', 'Music Venue') GROUP BY month ORDER BY month")
    naive = ("SELECT date_trunc('month', checkin_time) AS month, COUNT(*) AS checkins FROM checkins_nyc "
             "WHERE category_name ILIKE '%bar%' OR category_name ILIKE '%club%' OR category_name ILIKE '%music%' "
             "GROUP BY month ORDER BY month")
    add(29, {"type": "rows", "sql": ref}, naive,
        [gen({"request": "Monthly nightlife check-ins over the whole period", "terms": ["nightlife"]}, ref),
         exe(ref),
         act("plot_results", {"result_id": "r1", "kind": "line", "x": "month", "y": "checkins",
                              "title": "Nightlife check-ins per month"}, "Plot the trend."),
         summarized("Nightlife check-ins (bars, nightclubs, music venues) stay within a narrow band month to month; "
                    "the trend is in plot-1.")])

    # 30
    ref = "SELECT EXTRACT(HOUR FROM checkin_time) AS hour, COUNT(*) AS checkins FROM checkins_nyc GROUP BY hour ORDER BY hour"
    peak = max(sorted(hours), key=lambda h: hours[h])
    add(30, {"type": "rows", "sql": ref}, ref,
        [gen({"request": "Check-ins per hour of day", "dayparts": True}, ref), exe(ref),
         act("plot_results", {"result_id": "r1", "kind": "line", "x": "hour", "y": "checkins",
                              "title": "Check-ins by hour of day"}, "Plot the daily profile."),
         summarized(f"Late Night (0-4) is the quietest stretch; activity builds through the Morning, peaks at hour "
                    f"{peak} with {hours[peak]} check-ins, and tapers off in the Evening.")])

    # 31
    def cats(table):
        return (f"SELECT category_name, COUNT(*) AS checkins FROM {table} GROUP BY category_name "
                "ORDER BY checkins DESC")
    tk = Counter(c.category for c in tokyo).most_common(1)[0]
    add(31, {"type": "all_of", "of": [
            {"type": "ranked", "sql": cats("checkins_nyc"), "k": 5, "result": "any"},
            {"type": "ranked", "sql": cats("checkins_tokyo"), "k": 5, "result": "any"}]},
        "SELECT city, category_name, COUNT(*) FROM checkins GROUP BY city, category_name ORDER BY COUNT(*) DESC",
        [schema(),
         gen({"request": "Top 5 categories by check-ins in checkins_nyc"}, cats("checkins_nyc") + " LIMIT 5"),
         exe(cats("checkins_nyc") + " LIMIT 5"),
         gen({"request": "Top 5 categories by check-ins in checkins_tokyo"}, cats("checkins_tokyo") + " LIMIT 5",
             "Same for Tokyo, as a separate query."),
         exe(cats("checkins_tokyo") + " LIMIT 5"),
         final(f"NYC is led by {top_cat[0][0]} ({top_cat[0][1]}) while Tokyo is led by {tk[0]} ({tk[1]}); "
               "the top 5 for each city are in r1.csv and r2.csv.")])

    # 32
    def late_count(table):
        return f"SELECT COUNT(*) FROM {table} WHERE {late_sql}"
    ln, lt = sum(late(c) for c in nyc), sum(late(c) for c in tokyo)
    sql = (f"SELECT 'NYC' AS city, COUNT(*) AS late_checkins FROM checkins_nyc WHERE {late_sql} UNION ALL "
           f"SELECT 'Tokyo' AS city, COUNT(*) AS late_checkins FROM checkins_tokyo WHERE {late_sql}")
    text = (f"NYC has more late-night check-ins: {ln} versus {lt} in Tokyo." if ln >= lt else
            f"Tokyo has more late-night check-ins: {lt} versus {ln} in NYC.")
    add(32, {"type": "names_larger", "a": {"sql": late_count("checkins_nyc"), "labels": ["nyc", "new york"]},
             "b": {"sql": late_count("checkins_tokyo"), "labels": ["tokyo"]}},
        "SELECT city, COUNT(*) FROM checkins WHERE hour >= 22 OR hour < 4 GROUP BY city",
        [gen({"request": "Late-night check-ins (hour >= 22 or hour < 4) in each city, one count per table"}, sql),
         exe(sql), final(text)])

    # 33
    def per_place(table):
        return f"SELECT ROUND(COUNT(*) * 1.0 / COUNT(DISTINCT place_id), 2) FROM {table}"
    an = len(nyc) / len({c.place for c in nyc})
    at = len(tokyo) / len({c.place for c in tokyo})
    sql = (f"SELECT 'NYC' AS city, ROUND(COUNT(*) * 1.0 / COUNT(DISTINCT place_id), 2) AS avg_per_place "
           f"FROM checkins_nyc UNION ALL SELECT 'Tokyo' AS city, ROUND(COUNT(*) * 1.0 / COUNT(DISTINCT place_id), 2) "
           "AS avg_per_place FROM checkins_tokyo")
    add(33, {"type": "mentions_value", "values": [{"sql": per_place("checkins_nyc")},
                                                  {"sql": per_place("checkins_tokyo")}], "tolerance": 0.01},
        "SELECT city, AVG(checkin_count) FROM places GROUP BY city",
        [gen({"request": "Average check-ins per distinct place_id in each city"}, sql), exe(sql),
         final(f"NYC averages {an:.2f} check-ins per place and Tokyo {at:.2f}.")])

    # 34
    def trains(table):
        return f"SELECT COUNT(*) FROM {table} WHERE category_name = 'Train Station'"
    trn, trt = sum(c.category == "Train Station" for c in nyc), sum(c.category == "Train Station" for c in tokyo)
    text = (f"Tokyo has far more train station check-ins: {trt} versus {trn} in NYC." if trt >= trn else
            f"NYC has more train station check-ins: {trn} versus {trt} in Tokyo.")
    add(34, {"type": "all_of", "of": [
            {"type": "names_larger", "a": {"sql": trains("checkins_tokyo"), "labels": ["tokyo"]},
             "b": {"sql": trains("checkins_nyc"), "labels": ["nyc", "new york"]}},
            {"type": "mentions_value", "values": [{"sql": trains("checkins_tokyo")}, {"sql": trains("checkins_nyc")}]}]},
        "SELECT city, COUNT(*) FROM checkins WHERE category_name = 'Train Station' GROUP BY city",
        [gen({"request": "Train station check-ins in checkins_nyc", "terms": ["train stations"]},
             trains("checkins_nyc")),
         exe(trains("checkins_nyc")),
         exe(trains("checkins_tokyo"), "Same label in the Tokyo table."),
         final(text)])

    # 35
    def weekend_hours(table):
        return (f"SELECT EXTRACT(HOUR FROM checkin_time) AS hour, COUNT(*) AS checkins FROM {table} "
                "WHERE EXTRACT(DOW FROM checkin_time) IN (0, 6) GROUP BY hour")
    joined = ("SELECT EXTRACT(HOUR FROM n.checkin_time) AS hour, COUNT(n.user_id) AS nyc_checkins, "
              "COUNT(t.user_id) AS tokyo_checkins FROM checkins_nyc n JOIN checkins_tokyo t ON n.user_id = t.user_id "
              "WHERE EXTRACT(DOW FROM n.checkin_time) IN (0, 6) AND EXTRACT(DOW FROM t.checkin_time) IN (0, 6) "
              "GROUP BY hour ORDER BY hour")
    add(35, {"type": "all_of", "of": [
            {"type": "rows", "sql": weekend_hours("checkins_nyc"), "result": "any"},
            {"type": "rows", "sql": weekend_hours("checkins_tokyo"), "result": "any"}]},
        "SELECT city, EXTRACT(HOUR FROM checkin_time) AS hour, COUNT(*) FROM checkins "
        "WHERE EXTRACT(DOW FROM checkin_time) IN (0, 6) GROUP BY city, hour",
        [gen({"request": "Weekend check-ins per hour in NYC and Tokyo side by side"}, joined), exe(joined),
         final("Weekend activity in both cities peaks in the afternoon; hourly counts side by side are in r1.csv.")])

    return q


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "data" / "bench")
    args = ap.parse_args()

    fixtures = ROOT / "data" / "fixtures"
    nyc = load(fixtures / "checkins_nyc_5k.tsv")
    tokyo = load(fixtures / "checkins_tokyo_5k.tsv")
    built = build(nyc, tokyo)
    assert sorted(built) == list(range(1, 36))

    out = args.out
    for system in ("naive", "agentic"):
        (out / "replay" / system).mkdir(parents=True, exist_ok=True)

    suite = {"params": {"place_visit_threshold": "50"},
             "full_data_params": {"place_visit_threshold": "1000"},
             "questions": []}
    marks = {"questions": []}
    for qid, text, cats in QUESTIONS:
        oracle, naive_sql, steps = built[qid]
        suite["questions"].append({"id": qid, "text": text, "categories": list(cats), "oracle": oracle})
        marks["questions"].append({"id": qid, "naive": qid in NAIVE_CORRECT, "agentic": qid not in AGENT_WRONG})
        with open(out / "replay" / "naive" / f"q{qid:02d}.jsonl", "w") as f:
            f.write(json.dumps({"role": "sql_generator", "match": "step-0", "completion": naive_sql}) + "\n")
        with open(out / "replay" / "agentic" / f"q{qid:02d}.jsonl", "w") as f:
            for i, (role, completion) in enumerate(steps):
                f.write(json.dumps({"role": role, "match": f"step-{i}", "completion": completion}) + "\n")

    (out / "suite.json").write_text(json.dumps(suite, indent=1) + "\n")
    (out / "published_marks.json").write_text(json.dumps(marks, indent=1) + "\n")
    gens = sum(sum(r == "sql_generator" for r, _ in built[i][2]) for i in built)
    print(f"wrote {len(built)} questions to {out}; agentic generator calls {gens} ({gens / len(built):.2f} per question)")


if __name__ == "__main__":
    main()
