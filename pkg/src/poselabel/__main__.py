from poselabel.cli import main

main()
