from hardybergman.cli import main

main()
