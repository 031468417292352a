#!/usr/bin/env python3
"""Regenerates sample_stories.csv, a synthetic 200-row story-point dataset.

Effort is driven by the kind of action in each story, with noise, so a
text model has something to learn. Run from crates/core/data.
"""
import csv
import random

rng = random.Random(20230401)

ROLES = ["user", "administrator", "developer", "project manager", "customer",
         "support agent", "UI designer", "tester", "guest", "data analyst"]
OBJECTS = ["the login page", "the settings screen", "the dashboard", "the invoice report",
           "the user profile", "the search results", "the notification center",
           "the project list", "the billing module", "the Resources page"]
BENEFITS = ["I can work faster", "the team saves time", "customers stay informed",
            "errors are easier to spot", "the product looks consistent",
            "we meet the compliance rules", "I avoid manual steps"]

TIERS = [
    # (actions, point choices, extra detail sentences)
    (["fix the typo in", "change the label on", "update the icon in", "rename the button on",
      "adjust the color of"], [1, 1, 2, 2], []),
    (["add sorting to", "add a filter to", "add pagination to", "show a tooltip on",
      "validate the form in"], [2, 3, 3, 5], ["Acceptance: the change is covered by a unit test."]),
    (["export a CSV file from", "add email alerts for", "add role permissions to",
      "cache the queries behind", "add an audit log to"], [5, 5, 8], [
        "This touches the API and the frontend.",
        "Acceptance: integration tests pass and documentation is updated."]),
    (["redesign", "migrate the database behind", "integrate single sign-on with",
      "rewrite the backend of", "build offline synchronization for"], [8, 13, 13, 20], [
        "This requires a schema migration and coordination with the infrastructure team.",
        "Performance, security review and rollout planning are included.",
        "Legacy integrations must keep working during the transition."]),
]

rows = []
for i in range(200):
    actions, points, details = TIERS[i % 4]
    role = rng.choice(ROLES)
    obj = rng.choice(OBJECTS)
    action = rng.choice(actions)
    title = f"{action.split(' ')[0].capitalize()} {obj.replace('the ', '')}"
    desc = f"As a {role}, I want to {action} {obj}, so that {rng.choice(BENEFITS)}."
    if details:
        desc += " " + " ".join(rng.sample(details, rng.randint(1, len(details))))
    rows.append((title, desc, rng.choice(points)))

rng.shuffle(rows)
with open("sample_stories.csv", "w", newline="") as f:
    w = csv.writer(f, quoting=csv.QUOTE_MINIMAL)
    w.writerow(["title", "description", "weight"])
    w.writerows(rows)
