from degvrp.cli import main_entry

main_entry()
