#!/usr/bin/env python3
"""Regenerates the synthetic post fixtures under tests/fixtures/.

Output is a pure function of the seed below, so rerunning leaves the
checked-in files unchanged.
"""

import datetime as dt
import json
import pathlib
import random

ROOT = pathlib.Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "tests" / "fixtures"
SEED = 20240926

# One sentence template per impact category; each carries a keyword the mock
# classifier keys on.
CATEGORY_TEXT = {
    1: ["Two people were killed when the storm hit {place}.", "Rescuers are still searching, several injured near {place}."],
    2: ["We evacuated from {place} last night and are in a shelter now.", "Whole street displaced in {place} after the hurricane."],
    3: ["Power outage across {place}, the main road is under water.", "The bridge into {place} collapsed after the hurricane."],
    4: ["Storm surge wiped out the dunes and erosion is everywhere in {place}.", "Flood water contaminated the wells near {place}."],
    5: ["We need water and need food in {place}, supplies are running out.", "Shortage of bottled water at every store in {place}."],
    6: ["Mold is spreading in flooded homes around {place}.", "The hospital in {place} is out of insulin after the hurricane."],
    7: ["So scared and heartbroken after the hurricane in {place}.", "The grief in {place} is overwhelming, trauma everywhere."],
    8: ["People in {place} feel the hurricane response was unfair to poor neighborhoods.", "Lots of politics and blame over the flood response in {place}."],
    9: ["Volunteers handing out relief kits in {place}, please donate.", "Red Cross teams helping {place} recover from the hurricane."],
    10: ["Insurance claims piling up, my business in {place} is closed.", "Tourism in {place} is gone this season after the hurricane."],
    11: ["Thinking about everyone affected by the hurricane.", "Hurricane coverage all day on the news."],
}

IRRELEVANT_TEXT = [
    "Miami Hurricanes football looked great on Saturday!",
    "Carolina Hurricanes hockey home opener tonight.",
    "Use promo code STORM for a discount on rain jackets.",
    "Typhoon warnings issued across the Philippines.",
]

TEXT_PLACES = ["Asheville", "Tampa", "Savannah", "Charleston", "Knoxville", "Orlando", "Augusta", "Raleigh"]
METADATA_PLACES = ["Asheville, NC", "Tampa, FL", "St. Petersburg, Florida", "Savannah, GA", "Charleston, SC",
                   "Knoxville, Tennessee", "Orlando, FL", "Augusta, Georgia"]
HANDLES = ["@storm_chaser", "@wx.alerts", "@jane_doe99", "@NWS_Tampa"]
PLATFORMS = ["reddit", "tiktok", "youtube"]

START = dt.datetime(2024, 9, 23, tzinfo=dt.timezone.utc)
# Posts per week over the 12-week study window; peaks at landfall.
WEEKLY_VOLUME = [6, 38, 34, 26, 20, 16, 14, 12, 10, 9, 8, 7]
# Category weights per phase: early weeks lean physical, later weeks social.
EARLY = [10, 12, 20, 8, 8, 3, 6, 3, 5, 3, 8]
LATE = [2, 3, 6, 3, 3, 8, 9, 8, 20, 18, 8]


def timestamp(week: int, rng: random.Random) -> str:
    offset = dt.timedelta(days=week * 7 + rng.randrange(7), seconds=rng.randrange(86400))
    return (START + offset).strftime("%Y-%m-%dT%H:%M:%SZ")


def e2e_posts(rng: random.Random) -> list[dict]:
    posts = []
    n = 0
    for week, volume in enumerate(WEEKLY_VOLUME):
        weights = EARLY if week < 4 else LATE
        for _ in range(volume):
            n += 1
            post = {"id": f"p{n:03d}", "platform": PLATFORMS[n % 3], "text": "", "media_refs": [],
                    "created_at": timestamp(week, rng)}
            if rng.random() < 0.08:
                post["text"] = rng.choice(IRRELEVANT_TEXT)
            else:
                category = rng.choices(range(1, 12), weights=weights)[0]
                place = rng.choice(TEXT_PLACES)
                post["text"] = rng.choice(CATEGORY_TEXT[category]).format(place=place)
                if "hurricane" not in post["text"].lower() and "flood" not in post["text"].lower():
                    post["text"] += " #hurricane"
            if rng.random() < 0.3:
                post["text"] = f"{rng.choice(HANDLES)} {post['text']}"
            if rng.random() < 0.35:
                post["location_metadata"] = rng.choice(METADATA_PLACES)
            if rng.random() < 0.2:
                post["media_refs"] = [f"media/{post['id']}.jpg"]
            posts.append(post)
    assert len(posts) == 200, len(posts)
    return posts


def groundtruth(posts: list[dict]) -> list[tuple[str, float]]:
    # Disbursement-like signal trailing social activity by three weeks.
    social_weekly = [0] * len(WEEKLY_VOLUME)
    for p in posts:
        week = (dt.datetime.strptime(p["created_at"], "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=dt.timezone.utc) - START).days // 7
        social_weekly[week] += 1
    rows = []
    for week in range(len(WEEKLY_VOLUME)):
        source = social_weekly[week - 3] if week >= 3 else 0
        rows.append(((START + dt.timedelta(weeks=week)).strftime("%Y-%m-%d"), 1000.0 * source + 250.0 * week))
    return rows


CLEAN_POSTS = [
    # relevant under the mock keyword rules
    "Hurricane Helene flooded our whole neighborhood.",
    "Milton made landfall south of Tampa tonight.",
    "Storm surge is already over the seawall.",
    "Power is out everywhere after the hurricane.",
    "Praying for everyone in the path of Hurricane Milton.",
    "Flood water reached the second floor.",
    "Helene destroyed the bridge on I-40.",
    "We are riding out the hurricane at home.",
    "Francine is bringing heavy rain to Louisiana.",
    "Hurricane relief drive at the church this weekend.",
    "Flooding closed every road into town.",
    "This hurricane season has been brutal.",
    "Hurricane Milton evacuation traffic is backed up for miles.",
    "Landfall expected near Cedar Key.",
    # irrelevant under the mock keyword rules
    "Miami Hurricanes football crushed it tonight.",
    "Carolina Hurricanes hockey tickets on sale now.",
    "WWE legend Hurricane Helms returns.",
    "Use promo code HURRICANE for a discount.",
    "Typhoon season in Japan is starting.",
    "Lovely sunny day at the beach.",
]


def clean_posts() -> list[dict]:
    return [{"id": f"c{i + 1:02d}", "platform": PLATFORMS[i % 3], "text": text, "media_refs": [],
             "created_at": f"2024-10-{(i % 9) + 1:02d}T12:00:00Z"} for i, text in enumerate(CLEAN_POSTS)]


def write_jsonl(path: pathlib.Path, posts: list[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as f:
        for p in posts:
            f.write(json.dumps(p, ensure_ascii=False) + "\n")


def main() -> None:
    rng = random.Random(SEED)
    posts = e2e_posts(rng)
    write_jsonl(FIXTURES / "e2e" / "posts.jsonl", posts)
    with (FIXTURES / "e2e" / "groundtruth.csv").open("w", encoding="utf-8", newline="\n") as f:
        f.write("week_start,value\n")
        for week, value in groundtruth(posts):
            f.write(f"{week},{value:.1f}\n")
    write_jsonl(FIXTURES / "clean20" / "posts.jsonl", clean_posts())


if __name__ == "__main__":
    main()
